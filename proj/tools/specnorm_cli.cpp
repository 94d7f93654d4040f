// Command-line surface: generate instances, analyze tables, run the
// decomposition, verify results, and sweep experiment grids to CSV.
// Exit codes: 0 ok, 2 verification failure, 3 stage failure, 4 bad input.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specnorm/specnorm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 2;
constexpr int kExitStageFail = 3;
constexpr int kExitBadInput = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw specnorm::precondition_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw specnorm::precondition_error("cannot write " + path);
  out << text;
}

specnorm::Dyadic parse_dyadic_flag(const std::string& text, const std::string& flag) {
  auto d = specnorm::Dyadic::parse(text);
  if (!d) throw specnorm::precondition_error(flag + ": expected num or num/2^k, got " + text);
  return *d;
}

struct GenArgs {
  std::string kind;
  specnorm::GenParams params;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& args) {
  specnorm::GeneratedFunction g = specnorm::gen_function(args.kind, args.params, args.seed);
  specnorm::FunctionDocument doc = specnorm::document_of(g, args.params);
  write_output(args.out, specnorm::serialize_function(doc));
  return kExitOk;
}

std::string analyze_text(const specnorm::ordered_json& report) {
  std::ostringstream os;
  os << "n: " << report["n"].get<int>() << "\n"
     << "norm_a: " << report["norm_a"].get<std::string>() << "\n"
     << "epsilon: " << report["epsilon"].get<std::string>() << "\n"
     << "support: " << report["support"].get<std::size_t>() << "\n"
     << "spectrum support: " << report["spectrum_support"].get<std::size_t>() << "\n"
     << "spectrum histogram:\n";
  for (const auto& entry : report["spectrum_histogram"])
    os << "  " << entry[0].get<std::string>() << " x " << entry[1].get<std::size_t>() << "\n";
  return os.str();
}

struct AnalyzeArgs {
  std::string file;
  bool json = false;
  std::string out;
};

int run_analyze(const AnalyzeArgs& args) {
  specnorm::FunctionDocument doc = specnorm::parse_function(read_file(args.file));
  specnorm::ordered_json report = specnorm::analyze_json(doc.table);
  write_output(args.out, args.json ? report.dump() + "\n" : analyze_text(report));
  return kExitOk;
}

struct DecomposeArgs {
  std::string file;
  std::uint64_t seed = 0;
  int p_cap = 16;
  std::string eps_threshold;
  std::string eta;
  bool no_fallback = false;
  std::string out;
};

specnorm::DecomposeConfig decompose_config(const DecomposeArgs& args) {
  specnorm::DecomposeConfig config;
  config.seed = args.seed;
  config.p_cap = args.p_cap;
  config.allow_fallback = !args.no_fallback;
  if (!args.eps_threshold.empty())
    config.eps_threshold = parse_dyadic_flag(args.eps_threshold, "--eps-threshold");
  if (!args.eta.empty()) config.eta = parse_dyadic_flag(args.eta, "--eta");
  return config;
}

int run_decompose(const DecomposeArgs& args) {
  specnorm::FunctionDocument doc = specnorm::parse_function(read_file(args.file));
  auto [decomposition, trace] = specnorm::decompose(doc.table, decompose_config(args));
  specnorm::DecompositionDocument out{doc.table.n, std::move(decomposition), std::move(trace)};
  write_output(args.out, specnorm::serialize_decomposition(out));
  return kExitOk;
}

struct VerifyArgs {
  std::string function_file;
  std::string decomposition_file;
};

int run_verify(const VerifyArgs& args) {
  specnorm::FunctionDocument doc = specnorm::parse_function(read_file(args.function_file));
  specnorm::DecompositionDocument dec =
      specnorm::parse_decomposition(read_file(args.decomposition_file));
  if (dec.n != doc.table.n)
    throw specnorm::precondition_error("verify: ambient dimensions differ");
  specnorm::AlmostIntegerView view = specnorm::round_table(doc.table);
  if (!view.rounding_unique)
    throw specnorm::precondition_error("verify: table is not within 1/2 of integers");
  specnorm::FunctionTable f_z = specnorm::FunctionTable::zero(doc.table.n);
  for (std::size_t x = 0; x < f_z.size(); ++x) f_z[x] = specnorm::Dyadic(view.f_z[x]);
  specnorm::VerifyReport report = specnorm::verify_decomposition(f_z, dec.decomposition);
  std::cout << (report.pass ? "pass" : "fail") << " l=" << report.l
            << " max_deviation=" << report.max_deviation.str() << "\n";
  return report.pass ? kExitOk : kExitVerifyFail;
}

struct SweepArgs {
  std::string spec_file;
  std::string out;
};

struct SweepRowSpec {
  std::string generator;
  specnorm::GenParams params;
  std::uint64_t seed = 0;
};

std::vector<SweepRowSpec> expand_sweep(const specnorm::ordered_json& spec) {
  if (!spec.is_object() || spec.value("v", std::string()) != specnorm::kSchemaVersion ||
      !spec.contains("grid") || !spec["grid"].is_array())
    throw specnorm::precondition_error("sweep: spec needs v=v1 and a grid array");
  std::vector<SweepRowSpec> rows;
  for (const auto& entry : spec["grid"]) {
    SweepRowSpec base;
    base.generator = entry.value("generator", std::string());
    if (base.generator.empty())
      throw specnorm::precondition_error("sweep: grid entry without generator");
    base.params.n = entry.value("n", 8);
    if (entry.contains("params")) {
      const auto& p = entry["params"];
      base.params.terms = p.value("terms", base.params.terms);
      base.params.k = p.value("k", base.params.k);
      base.params.dim_min = p.value("dim_min", base.params.dim_min);
      base.params.dim_max = p.value("dim_max", base.params.dim_max);
    }
    if (!entry.contains("seeds") || !entry["seeds"].is_array())
      throw specnorm::precondition_error("sweep: grid entry without seeds");
    for (const auto& s : entry["seeds"]) {
      SweepRowSpec row = base;
      row.seed = s.get<std::uint64_t>();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

specnorm::ExperimentRow run_sweep_row(const SweepRowSpec& spec) {
  specnorm::ExperimentRow row;
  row.n = spec.params.n;
  row.seed = spec.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    specnorm::GeneratedFunction g = specnorm::gen_function(spec.generator, spec.params, spec.seed);
    row.m = specnorm::norm_a(g.table);
    specnorm::DecomposeConfig config;
    config.seed = spec.seed;
    auto [decomposition, trace] = specnorm::decompose(g.table, config);
    row.l = decomposition.l;
    row.steps = trace.size();
    row.status = "ok";
  } catch (const specnorm::stage_error& e) {
    const bool cap = e.stage == "decompose" &&
                     std::string(e.what()).find("step cap") != std::string::npos;
    row.status = cap ? "cap-exceeded" : "stage-failure " + e.stage;
  } catch (const std::exception& e) {
    row.status = "stage-failure internal";
    std::cerr << "sweep row seed " << spec.seed << ": " << e.what() << "\n";
  }
  const auto stop = std::chrono::steady_clock::now();
  row.wall_time_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count());
  return row;
}

// Rows run sequentially in expansion order, which is the canonical output
// order; a partial CSV resumes after its last complete row.
int run_sweep(const SweepArgs& args) {
  specnorm::ordered_json spec;
  try {
    spec = specnorm::ordered_json::parse(read_file(args.spec_file));
  } catch (const std::exception& e) {
    throw specnorm::precondition_error(std::string("sweep: invalid spec JSON: ") + e.what());
  }
  std::vector<SweepRowSpec> rows = expand_sweep(spec);

  std::size_t done = 0;
  {
    std::ifstream existing(args.out);
    if (existing) {
      std::string line;
      if (!std::getline(existing, line) || line != specnorm::kCsvHeader)
        throw specnorm::precondition_error("sweep: existing output has a foreign header");
      while (std::getline(existing, line))
        if (!line.empty()) ++done;
      if (done > rows.size())
        throw specnorm::precondition_error("sweep: existing output has more rows than the spec");
    }
  }

  std::ofstream out(args.out, std::ios::binary | std::ios::app);
  if (!out) throw specnorm::precondition_error("cannot write " + args.out);
  if (done == 0 && out.tellp() == std::ofstream::pos_type(0))
    out << specnorm::kCsvHeader << "\n";
  for (std::size_t i = done; i < rows.size(); ++i) {
    specnorm::ExperimentRow row = run_sweep_row(rows[i]);
    out << specnorm::csv_row(row) << "\n";
    out.flush();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact spectral-norm toolkit for integer-valued functions on F_2^n"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a function file");
  gen->add_option("kind", gen_args.kind, "one of: subspace-sum, character-sum, sparse-spectrum, boolean-random")
      ->required();
  gen->add_option("--n", gen_args.params.n, "ambient dimension");
  gen->add_option("--terms", gen_args.params.terms, "signed indicators (subspace-sum)");
  gen->add_option("--k", gen_args.params.k, "distinct frequencies (character/sparse)");
  gen->add_option("--dim-min", gen_args.params.dim_min, "minimum subspace dimension");
  gen->add_option("--dim-max", gen_args.params.dim_max, "maximum subspace dimension");
  gen->add_option("--seed", gen_args.seed, "random seed");
  gen->add_option("--out", gen_args.out, "output path (default stdout)");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand("analyze", "report exact spectral statistics");
  analyze->add_option("file", analyze_args.file, "function file")->required();
  analyze->add_flag("--json", analyze_args.json, "emit JSON instead of text");
  analyze->add_option("--out", analyze_args.out, "output path (default stdout)");

  DecomposeArgs decompose_args;
  CLI::App* dec = app.add_subcommand("decompose", "decompose into signed subspace indicators");
  dec->add_option("file", decompose_args.file, "function file")->required();
  dec->add_option("--seed", decompose_args.seed, "random seed");
  dec->add_option("--p-cap", decompose_args.p_cap, "largest even moment used");
  dec->add_option("--eps-threshold", decompose_args.eps_threshold,
                  "almost-integer threshold, num or num/2^k");
  dec->add_option("--eta", decompose_args.eta, "per-step drift allowance, num or num/2^k");
  dec->add_flag("--no-fallback", decompose_args.no_fallback,
                "fail instead of retrying with smaller subspaces");
  dec->add_option("--out", decompose_args.out, "output path (default stdout)");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "check a decomposition against a function");
  verify->add_option("function", verify_args.function_file, "function file")->required();
  verify->add_option("decomposition", verify_args.decomposition_file, "decomposition file")
      ->required();

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run an experiment grid to CSV");
  sweep->add_option("spec", sweep_args.spec_file, "sweep spec JSON")->required();
  sweep->add_option("--out", sweep_args.out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (analyze->parsed()) return run_analyze(analyze_args);
    if (dec->parsed()) return run_decompose(decompose_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
  } catch (const specnorm::stage_error& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return kExitStageFail;
  } catch (const specnorm::invariant_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitStageFail;
  } catch (const specnorm::precondition_error& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const specnorm::dim_mismatch& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStageFail;
  }
  return kExitBadInput;
}
