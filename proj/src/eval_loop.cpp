// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/eval_loop.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "specsva/error.hpp"
#include "specsva/sva.hpp"
#include "specsva/util.hpp"

namespace specsva {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return fmt::format("{}/{}", r.numerator(), r.denominator());
}

std::string to_decimal(const Rational& r, int places) {
  std::int64_t scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  std::int64_t num = r.numerator();
  const std::int64_t den = r.denominator();
  const bool neg = num < 0;
  if (neg) num = -num;
  std::int64_t scaled = (num * scale * 2 + den) / (den * 2);
  std::string digits = std::to_string(scaled / scale);
  if (places > 0) digits += fmt::format(".{:0{}}", scaled % scale, places);
  return (neg && scaled != 0 ? "-" : "") + digits;
}

std::string to_percent(const Rational& r) { return to_decimal(r * Rational(100), 1); }

std::size_t score(const DetectionMatrix& m, std::size_t i) {
  if (i >= m.n())
    throw Error(ErrorKind::IndexOutOfRange, fmt::format("assertion row {} out of range ({} rows)", i, m.n()), i);
  std::size_t s = 0;
  for (std::size_t j = 0; j < m.k(); ++j) s += m.at(i, j) ? 1 : 0;
  return s;
}

Rational avg_mutation_score(const DetectionMatrix& m) {
  if (m.n() == 0) throw Error(ErrorKind::EmptyAssertionSet, "average mutation score of an empty assertion set");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < m.n(); ++i) total += static_cast<std::int64_t>(score(m, i));
  return Rational(total, static_cast<std::int64_t>(m.n()));
}

std::vector<std::size_t> undetected_columns(const DetectionMatrix& m) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < m.k(); ++j) {
    bool hit = false;
    for (std::size_t i = 0; i < m.n() && !hit; ++i) hit = m.at(i, j);
    if (!hit) out.push_back(j);
  }
  return out;
}

Rational mdr(const DetectionMatrix& m) {
  if (m.k() == 0) throw Error(ErrorKind::EmptyMutantSet, "MDR over an empty mutant set");
  auto missed = static_cast<std::int64_t>(undetected_columns(m).size());
  auto k = static_cast<std::int64_t>(m.k());
  return Rational(k - missed, k);
}

LabelMap parse_labels(std::string_view json_text) {
  LabelMap out;
  try {
    auto j = json::parse(json_text);
    for (const auto& [id, v] : j.items()) {
      if (id == "$comment") continue;
      out[id] = Label{v.at("semantically_corr").get<bool>(), v.value("note", "")};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedDocument, std::string("labels file: ") + e.what());
  }
  return out;
}

std::string write_labels(const LabelMap& labels) {
  ordered_json j = ordered_json::object();
  for (const auto& [id, l] : labels) j[id] = {{"semantically_corr", l.semantically_corr}, {"note", l.note}};
  return j.dump(2) + "\n";
}

Rational fpr(const std::vector<std::string>& final_set, const std::map<std::string, bool>& golden_fails,
             const LabelMap& labels) {
  std::int64_t bad = 0;
  for (const auto& id : final_set) {
    auto g = golden_fails.find(id);
    if (g == golden_fails.end()) throw Error(ErrorKind::MissingLabel, "no golden result for assertion " + id);
    auto l = labels.find(id);
    if (l == labels.end()) throw Error(ErrorKind::MissingLabel, "no semantic label for assertion " + id);
    if (g->second && !l->second.semantically_corr) ++bad;
  }
  if (final_set.empty()) return Rational(0);
  return Rational(bad, static_cast<std::int64_t>(final_set.size()));
}

std::vector<std::size_t> prune(const DetectionMatrix& m) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < m.n(); ++i)
    if (score(m, i) > 0) keep.push_back(i);
  return keep;
}

std::vector<std::string> mutation_points(const std::vector<std::string>& undetected,
                                         const std::vector<Mutant>& mutants) {
  std::vector<std::string> cues;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& id : undetected) {
    auto it = std::find_if(mutants.begin(), mutants.end(), [&](const Mutant& m) { return m.id == id; });
    if (it == mutants.end()) throw Error(ErrorKind::UnknownMutantId, "no manifest entry for mutant " + id);
    auto signals = util::join(it->affected, ", ");
    auto op = to_string(it->op.kind);
    if (!seen.insert({signals, op}).second) continue;
    cues.push_back(fmt::format("{} at {} affecting {}", op, it->location, signals));
  }
  return cues;
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::MdrOne: return "mdr_one";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::NoProgress: return "no_progress";
  }
  return "max_iter";
}

std::vector<IterationState> run_refinement(std::vector<NamedAssertion> initial, const std::vector<Mutant>& mutants,
                                           const RefinementConfig& cfg, const RefinementHooks& hooks) {
  if (cfg.max_iter < 1) throw Error(ErrorKind::ConfigError, "max_iter must be at least 1");
  std::vector<std::string> mutant_ids;
  for (const auto& m : mutants) mutant_ids.push_back(m.id);

  std::map<std::string, std::vector<std::uint8_t>> rows;
  std::map<std::string, Provenance> first_provenance;
  std::vector<NamedAssertion> current;
  std::set<std::string> texts;
  auto admit = [&](std::vector<NamedAssertion> batch, std::vector<std::string>* added) {
    for (auto& a : batch) {
      auto key = normalize_whitespace(render_sva([&] {
        SvaAst unlabeled = a.ast;
        unlabeled.label.clear();
        return unlabeled;
      }()));
      if (!texts.insert(key).second) continue;
      if (added) added->push_back(a.id);
      current.push_back(std::move(a));
    }
  };
  admit(std::move(initial), nullptr);

  std::vector<IterationState> history;
  for (int it = 0; it < cfg.max_iter; ++it) {
    std::vector<NamedAssertion> fresh;
    for (const auto& a : current)
      if (!rows.count(a.id)) fresh.push_back(a);
    if (!fresh.empty()) {
      auto part = hooks.check(fresh);
      for (std::size_t i = 0; i < fresh.size(); ++i) {
        std::vector<std::uint8_t> row(part.k());
        for (std::size_t j = 0; j < part.k(); ++j) row[j] = part.at(i, j) ? 1 : 0;
        rows[fresh[i].id] = std::move(row);
      }
    }
    IterationState st;
    st.iteration = it;
    std::vector<std::string> ids;
    for (const auto& a : current) ids.push_back(a.id);
    st.assertions = ids;
    st.matrix = DetectionMatrix(ids, mutant_ids);
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = 0; j < mutant_ids.size(); ++j) st.matrix.set(i, j, rows[ids[i]][j] != 0);
    st.mdr = mdr(st.matrix);
    for (auto j : undetected_columns(st.matrix)) st.undetected.push_back(mutant_ids[j]);
    auto keep = prune(st.matrix);
    st.avg_pre = current.empty() ? Rational(0) : avg_mutation_score(st.matrix);
    st.avg_post = keep.empty() ? Rational(0) : avg_mutation_score(st.matrix.select_rows(keep));
    std::vector<NamedAssertion> survivors;
    for (auto i : keep) {
      st.survivors.push_back(ids[i]);
      survivors.push_back(current[i]);
    }
    if (st.mdr == Rational(1))
      st.stop = StopReason::MdrOne;
    else if (it > 0 && st.undetected == history.back().undetected)
      st.stop = StopReason::NoProgress;
    else if (it + 1 == cfg.max_iter)
      st.stop = StopReason::MaxIter;
    if (st.stop) {
      history.push_back(std::move(st));
      break;
    }
    st.cues = mutation_points(st.undetected, mutants);
    current = std::move(survivors);
    auto batch = hooks.regenerate(it + 1, st.cues);
    admit(std::move(batch), &st.added);
    history.push_back(std::move(st));
  }
  return history;
}

// ---------------------------------------------------------------------------
// Report.

Rational syntax_rate(const ReportRow& r) {
  if (r.generated == 0) return Rational(0);
  return Rational(static_cast<std::int64_t>(r.syntax_correct), static_cast<std::int64_t>(r.generated));
}

Rational functional_rate(const ReportRow& r) {
  if (r.syntax_correct == 0) return Rational(0);
  return Rational(static_cast<std::int64_t>(r.functional_correct), static_cast<std::int64_t>(r.syntax_correct));
}

ordered_json report_json(const std::vector<ReportRow>& rows, const std::vector<IterationState>& history) {
  ordered_json out;
  out["schema"] = "specsva/report";
  out["version"] = 1;
  out["columns"] = {"Design",        "Method", "#SVAs Gen.", "Syntax Correctness (%)", "Functional Correctness (%)",
                    "Avg. Mutation Score", "MDR (%)", "FPR (%)"};
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["design"] = r.design;
    j["method"] = r.method;
    j["svas_generated"] = r.generated;
    j["syntax_correct"] = r.syntax_correct;
    j["syntax_correctness"] = to_string(syntax_rate(r));
    j["functional_correct"] = r.functional_correct;
    j["functional_correctness"] = to_string(functional_rate(r));
    j["avg_mutation_score_pre_prune"] = to_string(r.avg_score_pre);
    j["avg_mutation_score_post_prune"] = to_string(r.avg_score_post);
    j["mdr"] = to_string(r.mdr);
    j["fpr"] = r.fpr ? ordered_json(to_string(*r.fpr)) : ordered_json(nullptr);
    j["final_assertions"] = r.final_count;
    j["mutants"] = r.mutants;
    j["iterations"] = r.iterations;
    j["stop_reason"] = r.stop_reason;
    arr.push_back(j);
  }
  out["rows"] = arr;
  ordered_json its = ordered_json::array();
  for (const auto& s : history) {
    ordered_json j;
    j["iteration"] = s.iteration;
    j["assertions"] = s.assertions;
    j["mdr"] = to_string(s.mdr);
    j["avg_mutation_score_pre_prune"] = to_string(s.avg_pre);
    j["avg_mutation_score_post_prune"] = to_string(s.avg_post);
    j["survivors"] = s.survivors;
    j["undetected"] = s.undetected;
    j["mutation_points"] = s.cues;
    j["added"] = s.added;
    j["stop_reason"] = s.stop ? ordered_json(std::string(to_string(*s.stop))) : ordered_json(nullptr);
    its.push_back(j);
  }
  out["iterations"] = its;
  return out;
}

std::string report_markdown(const std::vector<ReportRow>& rows) {
  std::string out =
      "| Design | Method | #SVAs Gen. | Syntax Correctness (%) | Functional Correctness (%) | Avg. Mutation Score | "
      "MDR (%) | FPR (%) |\n"
      "|---|---|---|---|---|---|---|---|\n";
  auto fpr_cell = [](const std::optional<Rational>& f) { return f ? to_percent(*f) : std::string("n/a"); };
  for (const auto& r : rows)
    out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |\n", r.design, r.method, r.generated,
                       to_percent(syntax_rate(r)), to_percent(functional_rate(r)), to_decimal(r.avg_score_pre, 2),
                       to_percent(r.mdr), fpr_cell(r.fpr));
  if (rows.size() > 1) {
    Rational gen, syn, fun, avg, m, f;
    bool all_fpr = true;
    for (const auto& r : rows) {
      gen += Rational(static_cast<std::int64_t>(r.generated));
      syn += syntax_rate(r);
      fun += functional_rate(r);
      avg += r.avg_score_pre;
      m += r.mdr;
      if (r.fpr)
        f += *r.fpr;
      else
        all_fpr = false;
    }
    Rational n(static_cast<std::int64_t>(rows.size()));
    out += fmt::format("| Avg. | - | {} | {} | {} | {} | {} | {} |\n", to_decimal(gen / n, 1), to_percent(syn / n),
                       to_percent(fun / n), to_decimal(avg / n, 2), to_percent(m / n),
                       all_fpr ? to_percent(f / n) : std::string("n/a"));
  }
  out += "\n";
  for (const auto& r : rows) {
    out += fmt::format(
        "- {} / {}: {} mutants, {} final assertions, avg. mutation score {} before pruning and {} after, "
        "{} iteration(s), stopped on {}.",
        r.design, r.method, r.mutants, r.final_count, to_decimal(r.avg_score_pre, 2), to_decimal(r.avg_score_post, 2),
        r.iterations, r.stop_reason);
    if (!r.fpr) out += " FPR needs semantic labels for the assertions that fail on the golden design.";
    out += "\n";
  }
  return out;
}

}  // namespace specsva
