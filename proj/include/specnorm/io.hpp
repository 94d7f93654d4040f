#pragma once

// File formats: function tables and decompositions as versioned JSON,
// experiment results as CSV. Serialization is canonical (stable key order,
// compact dump, trailing newline) so equal objects produce identical bytes.
// Dyadic values in tables are [numerator_string, log2_denominator] pairs;
// scalar rationals elsewhere are "num/2^k" strings. Numbers that reach CSV
// are dyadic, hence rendered as exact decimals; the "~" prefix is reserved
// for any future inexact rendering.

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "decompose.hpp"
#include "dyadic.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "generators.hpp"
#include "gf2.hpp"

namespace specnorm {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "v1";

inline std::string word_to_hex(Word w) {
  std::ostringstream os;
  os << "0x" << std::hex << w;
  return os.str();
}

inline Word parse_word_hex(const std::string& s, int n) {
  if (s.size() < 3 || s[0] != '0' || s[1] != 'x')
    throw precondition_error("parse: word is not a 0x hex string: " + s);
  Word w = 0;
  for (std::size_t i = 2; i < s.size(); ++i) {
    char c = s[i];
    int digit;
    if (c >= '0' && c <= '9') digit = c - '0';
    else if (c >= 'a' && c <= 'f') digit = 10 + (c - 'a');
    else throw precondition_error("parse: bad hex digit in " + s);
    if (w > (~Word{0} >> 4)) throw precondition_error("parse: hex word overflows: " + s);
    w = (w << 4) | static_cast<Word>(digit);
  }
  if ((w & ~word_mask(n)) != 0)
    throw precondition_error("parse: word " + s + " outside ambient dimension");
  return w;
}

inline ordered_json dyadic_to_pair(const Dyadic& d) {
  return ordered_json::array({d.numerator().str(), d.log2_denominator()});
}

inline Dyadic dyadic_from_pair(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_number_integer() ||
      j[1].get<long long>() < 0)
    throw precondition_error("parse: value is not a [numerator, log2_denominator] pair");
  BigInt num;
  try {
    num = BigInt(j[0].get<std::string>());
  } catch (const std::exception&) {
    throw precondition_error("parse: bad numerator " + j[0].dump());
  }
  return Dyadic::scaled(num, j[1].get<unsigned>());
}

inline Dyadic dyadic_from_string(const ordered_json& j) {
  if (!j.is_string()) throw precondition_error("parse: rational is not a string");
  auto d = Dyadic::parse(j.get<std::string>());
  if (!d) throw precondition_error("parse: bad rational " + j.get<std::string>());
  return *d;
}

inline ordered_json subspace_to_json(const Subspace& v) {
  ordered_json basis = ordered_json::array();
  for (Word row : v.basis()) basis.push_back(word_to_hex(row));
  return basis;
}

inline Subspace subspace_from_json(const ordered_json& j, int n) {
  if (!j.is_array()) throw precondition_error("parse: basis is not an array");
  std::vector<Word> gens;
  for (const auto& e : j) {
    if (!e.is_string()) throw precondition_error("parse: basis entry is not a string");
    gens.push_back(parse_word_hex(e.get<std::string>(), n));
  }
  return Subspace::from_generators(n, gens);
}

// A function table plus opaque metadata, as stored on disk.
struct FunctionDocument {
  FunctionTable table;
  ordered_json metadata;  // null when absent; preserved verbatim
};

inline std::string serialize_function(const FunctionDocument& doc) {
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["n"] = doc.table.n;
  ordered_json values = ordered_json::array();
  for (const Dyadic& d : doc.table.values) values.push_back(dyadic_to_pair(d));
  j["values"] = std::move(values);
  if (!doc.metadata.is_null()) j["metadata"] = doc.metadata;
  return j.dump() + "\n";
}

inline FunctionDocument parse_function(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw precondition_error(std::string("parse: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("v", std::string()) != kSchemaVersion)
    throw precondition_error("parse: missing or unsupported schema version");
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw precondition_error("parse: missing ambient dimension");
  const int n = j["n"].get<int>();
  check_dim(n);
  if (!j.contains("values") || !j["values"].is_array())
    throw precondition_error("parse: missing values array");
  const auto& values = j["values"];
  if (values.size() != (std::size_t{1} << n))
    throw precondition_error("parse: values length does not match 2^n");
  FunctionDocument doc;
  doc.table = FunctionTable::zero(n);
  for (std::size_t x = 0; x < values.size(); ++x) doc.table[x] = dyadic_from_pair(values[x]);
  if (j.contains("metadata")) doc.metadata = j["metadata"];
  return doc;
}

inline ordered_json signed_terms_to_json(const std::vector<SignedTerm>& terms) {
  ordered_json arr = ordered_json::array();
  for (const SignedTerm& t : terms) {
    ordered_json e;
    e["sign"] = t.sign;
    e["basis"] = subspace_to_json(t.subspace);
    arr.push_back(std::move(e));
  }
  return arr;
}

inline std::vector<SignedTerm> signed_terms_from_json(const ordered_json& j, int n) {
  if (!j.is_array()) throw precondition_error("parse: terms is not an array");
  std::vector<SignedTerm> terms;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("sign") || !e.contains("basis"))
      throw precondition_error("parse: term needs sign and basis");
    const int sign = e["sign"].get<int>();
    if (sign != 1 && sign != -1) throw precondition_error("parse: term sign must be +-1");
    terms.push_back(SignedTerm{sign, subspace_from_json(e["basis"], n)});
  }
  return terms;
}

inline FunctionDocument document_of(const GeneratedFunction& g, const GenParams& params) {
  FunctionDocument doc;
  doc.table = g.table;
  ordered_json meta;
  meta["generator"] = g.kind;
  meta["seed"] = g.seed;
  ordered_json p;
  p["n"] = params.n;
  if (g.kind == "subspace-sum") p["terms"] = params.terms;
  if (g.kind == "character-sum" || g.kind == "sparse-spectrum") p["k"] = params.k;
  meta["params"] = std::move(p);
  if (g.kind == "subspace-sum") meta["terms"] = signed_terms_to_json(g.terms);
  doc.metadata = std::move(meta);
  return doc;
}

struct DecompositionDocument {
  int n = 0;
  Decomposition decomposition;
  IterationTrace trace;
};

inline std::string serialize_decomposition(const DecompositionDocument& doc) {
  ordered_json j;
  j["v"] = kSchemaVersion;
  j["kind"] = "decomposition";
  j["n"] = doc.n;
  j["source_norm"] = doc.decomposition.source_norm.to_string();
  j["l"] = doc.decomposition.l;
  j["terms"] = signed_terms_to_json(doc.decomposition.terms);
  ordered_json trace = ordered_json::array();
  for (const StepRecord& r : doc.trace) {
    ordered_json e;
    e["step"] = r.step;
    e["norm"] = r.norm_before.to_string();
    e["epsilon"] = r.epsilon_before.to_string();
    e["v_dim"] = r.v_dim;
    e["coset_terms"] = r.coset_terms;
    e["support"] = r.support_before;
    e["p"] = r.p_used;
    e["fallback"] = r.fallback_level;
    trace.push_back(std::move(e));
  }
  j["trace"] = std::move(trace);
  return j.dump() + "\n";
}

inline DecompositionDocument parse_decomposition(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw precondition_error(std::string("parse: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("v", std::string()) != kSchemaVersion ||
      j.value("kind", std::string()) != "decomposition")
    throw precondition_error("parse: not a v1 decomposition file");
  DecompositionDocument doc;
  doc.n = j.value("n", -1);
  check_dim(doc.n);
  doc.decomposition.source_norm = dyadic_from_string(j.at("source_norm"));
  doc.decomposition.terms = signed_terms_from_json(j.at("terms"), doc.n);
  doc.decomposition.l = doc.decomposition.terms.size();
  if (j.contains("l") && j["l"].get<std::size_t>() != doc.decomposition.l)
    throw precondition_error("parse: stored l disagrees with the term count");
  if (j.contains("trace")) {
    for (const auto& e : j["trace"]) {
      StepRecord r;
      r.step = e.value("step", 0);
      r.norm_before = dyadic_from_string(e.at("norm"));
      r.epsilon_before = dyadic_from_string(e.at("epsilon"));
      r.v_dim = e.value("v_dim", 0);
      r.coset_terms = e.value("coset_terms", std::size_t{0});
      r.support_before = e.value("support", std::size_t{0});
      r.p_used = e.value("p", 0);
      r.fallback_level = e.value("fallback", 0);
      doc.trace.push_back(std::move(r));
    }
  }
  return doc;
}

// Exact analysis report: norm, distance to integers, integer support,
// histogram of nonzero spectral magnitudes (descending, with counts).
inline ordered_json analyze_json(const FunctionTable& f) {
  SpectrumTable s = wht(f);
  AlmostIntegerView view = round_table(f);
  std::size_t support = 0;
  for (const BigInt& z : view.f_z)
    if (!z.is_zero()) ++support;
  std::vector<Dyadic> mags;
  for (const Dyadic& c : s.values)
    if (!c.is_zero()) mags.push_back(abs(c));
  std::sort(mags.begin(), mags.end(), [](const Dyadic& a, const Dyadic& b) { return b < a; });
  ordered_json hist = ordered_json::array();
  for (std::size_t i = 0; i < mags.size();) {
    std::size_t j = i;
    while (j < mags.size() && mags[j] == mags[i]) ++j;
    hist.push_back(ordered_json::array({mags[i].to_string(), j - i}));
    i = j;
  }
  ordered_json out;
  out["v"] = kSchemaVersion;
  out["n"] = f.n;
  out["norm_a"] = spectral_norm(s).to_string();
  out["epsilon"] = view.epsilon.to_string();
  out["support"] = support;
  out["spectrum_support"] = mags.size();
  out["spectrum_histogram"] = std::move(hist);
  return out;
}

struct ExperimentRow {
  int n = 0;
  Dyadic m;
  std::size_t l = 0;
  std::size_t steps = 0;
  std::uint64_t wall_time_ms = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
};

inline constexpr const char* kCsvHeader = "n,M,L,steps,wall_time_ms,seed,status";

inline std::string csv_row(const ExperimentRow& row) {
  std::ostringstream os;
  os << row.n << ',' << row.m.to_decimal() << ',' << row.l << ',' << row.steps << ','
     << row.wall_time_ms << ',' << row.seed << ',' << row.status;
  return os.str();
}

}  // namespace specnorm
