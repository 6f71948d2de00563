// Copyright 2026 The specsva Authors.
// SPDX-License-Identifier: Apache-2.0

#include "specsva/checker.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "specsva/error.hpp"
#include "specsva/util.hpp"

namespace specsva {

using nlohmann::json;

void validate(const CheckConfig& cfg) {
  if (cfg.trace_length < 2) throw Error(ErrorKind::ConfigError, "check.trace_length must be at least 2");
  if (cfg.mode == CheckMode::Random && cfg.max_stimuli < 1)
    throw Error(ErrorKind::ConfigError, "check.max_stimuli must be at least 1");
  if (cfg.exhaustive_cap > 40) throw Error(ErrorKind::ConfigError, "check.exhaustive_cap above 40 is not supported");
}

namespace {

struct Job {
  std::optional<BoundAssertion> bound;
  std::size_t span = 0;
  std::optional<Witness> found;
  bool fired = false;
};

class Explorer {
 public:
  Explorer(const Simulator& sim, const CheckConfig& cfg, std::vector<Job>& jobs)
      : sim_(sim), cfg_(cfg), jobs_(jobs), len_(cfg.trace_length), trace_(sim.make_trace(cfg.trace_length)) {
    const auto& names = sim.input_names();
    if (!cfg.reset.empty()) {
      auto it = std::find(names.begin(), names.end(), cfg.reset);
      if (it == names.end()) throw Error(ErrorKind::ConfigError, "check.reset '" + cfg.reset + "' is not an input");
      reset_ = static_cast<int>(it - names.begin());
    }
    for (std::size_t i = 0; i < names.size(); ++i)
      if (static_cast<int>(i) != reset_) bits_ += static_cast<std::size_t>(sim.input_widths()[i]);
    rows_.assign(len_, std::vector<std::uint64_t>(sim.input_count(), 0));
    for (std::size_t t = 0; t < len_; ++t) apply_reset(rows_[t], t);
    for (const auto& j : jobs_)
      if (j.bound && !j.found) ++remaining_;
  }

  void run() {
    if (remaining_ == 0) return;
    if (cfg_.mode == CheckMode::Exhaustive) {
      if (bits_ * len_ > cfg_.exhaustive_cap)
        throw Error(ErrorKind::BudgetExceeded,
                    fmt::format("exhaustive check needs {} input bits x {} cycles = {} > cap {}", bits_, len_,
                                bits_ * len_, cfg_.exhaustive_cap));
      dfs(0, sim_.initial_state());
    } else {
      random();
    }
  }

 private:
  void apply_reset(std::vector<std::uint64_t>& row, std::size_t t) const {
    if (reset_ < 0) return;
    bool active = t < cfg_.reset_cycles;
    row[static_cast<std::size_t>(reset_)] = (active != cfg_.reset_active_low) ? 1 : 0;
  }

  void decode(std::uint64_t combo, std::vector<std::uint64_t>& out) const {
    const auto& widths = sim_.input_widths();
    for (std::size_t i = 0; i < widths.size(); ++i) {
      if (static_cast<int>(i) == reset_) continue;
      out[i] = combo & width_mask(widths[i]);
      combo >>= widths[i];
    }
  }

  void dfs(std::size_t depth, const Simulator::State& state) {
    const std::uint64_t combos = std::uint64_t{1} << bits_;
    for (std::uint64_t c = 0; c < combos && remaining_ > 0; ++c) {
      decode(c, rows_[depth]);
      auto next = sim_.step(state, rows_[depth], trace_, depth);
      check_closing(depth);
      if (depth + 1 < len_) dfs(depth + 1, next);
    }
  }

  // Start cycles whose windows close at `depth` are fully determined now.
  void check_closing(std::size_t depth) {
    for (auto& j : jobs_) {
      if (!j.bound || j.found || depth < j.span) continue;
      std::size_t t = depth - j.span;
      Verdict v = j.bound->eval_at(trace_, t);
      if (v.kind == Verdict::Kind::Pass) j.fired = true;
      if (v.failed()) {
        j.found = witness(depth + 1, t);
        --remaining_;
      }
    }
  }

  void random() {
    std::mt19937_64 rng(cfg_.seed);
    const auto& widths = sim_.input_widths();
    for (std::size_t s = 0; s < cfg_.max_stimuli && remaining_ > 0; ++s) {
      for (std::size_t t = 0; t < len_; ++t) {
        for (std::size_t i = 0; i < widths.size(); ++i) rows_[t][i] = rng() & width_mask(widths[i]);
        apply_reset(rows_[t], t);
      }
      auto state = sim_.initial_state();
      for (std::size_t t = 0; t < len_; ++t) state = sim_.step(state, rows_[t], trace_, t);
      for (auto& j : jobs_) {
        if (!j.bound || j.found) continue;
        for (std::size_t t = 0; t + j.span < len_; ++t) {
          Verdict v = j.bound->eval_at(trace_, t);
          if (v.kind == Verdict::Kind::Pass) j.fired = true;
          if (v.failed()) {
            j.found = witness(len_, t);
            --remaining_;
            break;
          }
        }
      }
    }
  }

  /// Rows [0, fixed) as driven so far; later rows held at zero.
  Witness witness(std::size_t fixed, std::size_t fail_cycle) const {
    Witness w;
    w.stimulus.inputs = sim_.input_names();
    for (std::size_t t = 0; t < len_; ++t) {
      w.stimulus.rows.push_back(t < fixed ? rows_[t] : std::vector<std::uint64_t>(sim_.input_count(), 0));
      apply_reset(w.stimulus.rows.back(), t);
    }
    w.trace = sim_.run(w.stimulus);
    w.fail_cycle = fail_cycle;
    return w;
  }

  const Simulator& sim_;
  const CheckConfig& cfg_;
  std::vector<Job>& jobs_;
  std::size_t len_;
  Trace trace_;
  std::vector<std::vector<std::uint64_t>> rows_;
  std::size_t bits_ = 0;
  std::size_t remaining_ = 0;
  int reset_ = -1;
};

Job make_job(const SvaAst& ast, const Simulator& sim, const RtlModule& rtl) {
  Job j;
  j.bound.emplace(ast, sim.trace_names(), sim.trace_widths(), rtl.constants());
  j.span = static_cast<std::size_t>(j.bound->total_span());
  return j;
}

}  // namespace

DetectResult detect(const SvaAst& assertion, const RtlModule& rtl, const CheckConfig& cfg) {
  validate(cfg);
  Simulator sim(rtl);
  std::vector<Job> jobs;
  jobs.push_back(make_job(assertion, sim, rtl));
  Explorer(sim, cfg, jobs).run();
  DetectResult r;
  r.detected = jobs[0].found.has_value();
  r.witness = std::move(jobs[0].found);
  return r;
}

std::string to_string(GoldenResult::Kind k) {
  switch (k) {
    case GoldenResult::Kind::Holds: return "holds";
    case GoldenResult::Kind::Fails: return "fails";
    case GoldenResult::Kind::Vacuous: return "vacuous";
  }
  return "?";
}

GoldenResult check_golden(const SvaAst& assertion, const RtlModule& rtl, const CheckConfig& cfg) {
  validate(cfg);
  Simulator sim(rtl);
  std::vector<Job> jobs;
  jobs.push_back(make_job(assertion, sim, rtl));
  Explorer(sim, cfg, jobs).run();
  GoldenResult g;
  if (jobs[0].found) {
    g.kind = GoldenResult::Kind::Fails;
    g.counterexample = std::move(jobs[0].found);
  } else {
    g.kind = jobs[0].fired ? GoldenResult::Kind::Holds : GoldenResult::Kind::Vacuous;
  }
  return g;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Simulated: return "simulated";
    case Provenance::External: return "external";
    case Provenance::Skipped: return "skipped";
  }
  return "?";
}

DetectionMatrix::DetectionMatrix(std::vector<std::string> assertion_ids, std::vector<std::string> mutant_ids)
    : assertions(std::move(assertion_ids)), mutants(std::move(mutant_ids)) {
  cells.assign(assertions.size() * mutants.size(), 0);
  provenance.assign(cells.size(), Provenance::Simulated);
}

void DetectionMatrix::set(std::size_t i, std::size_t j, bool v, Provenance p) {
  cells[i * k() + j] = v ? 1 : 0;
  provenance[i * k() + j] = p;
}

DetectionMatrix DetectionMatrix::select_rows(const std::vector<std::size_t>& rows) const {
  std::vector<std::string> ids;
  for (auto r : rows) ids.push_back(assertions.at(r));
  DetectionMatrix out(ids, mutants);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < k(); ++j) out.set(i, j, at(rows[i], j), provenance_at(rows[i], j));
  return out;
}

MatrixResult build_matrix(const std::vector<NamedAssertion>& assertions, const std::vector<Mutant>& mutants,
                          const CheckConfig& cfg) {
  validate(cfg);
  std::vector<std::string> aids;
  std::vector<std::string> mids;
  for (const auto& a : assertions) aids.push_back(a.id);
  for (const auto& m : mutants) mids.push_back(m.id);

  struct Column {
    std::vector<std::uint8_t> bits;
    std::vector<Provenance> prov;
    std::vector<std::optional<Witness>> witnesses;
  };
  std::vector<Column> columns(mutants.size());

  auto work = [&](std::size_t j) {
    const auto& mut = mutants[j];
    Simulator sim(mut.module);
    std::vector<Job> jobs;
    Column col;
    col.prov.assign(assertions.size(), Provenance::Simulated);
    for (std::size_t i = 0; i < assertions.size(); ++i) {
      try {
        jobs.push_back(make_job(assertions[i].ast, sim, mut.module));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnknownSignal) throw;
        jobs.emplace_back();
        col.prov[i] = Provenance::Skipped;
      }
    }
    Explorer(sim, cfg, jobs).run();
    for (auto& job : jobs) {
      col.bits.push_back(job.found ? 1 : 0);
      col.witnesses.push_back(std::move(job.found));
    }
    columns[j] = std::move(col);
  };

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, mutants.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t j = next.fetch_add(1);
      if (j >= mutants.size()) return;
      try {
        work(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = mutants.size();
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  MatrixResult result;
  result.matrix = DetectionMatrix(aids, mids);
  for (std::size_t j = 0; j < mutants.size(); ++j) {
    for (std::size_t i = 0; i < assertions.size(); ++i) {
      result.matrix.set(i, j, columns[j].bits[i] != 0, columns[j].prov[i]);
      if (columns[j].witnesses[i]) result.witnesses.emplace(std::make_pair(i, j), std::move(*columns[j].witnesses[i]));
    }
  }
  return result;
}

std::string matrix_to_json(const DetectionMatrix& m) {
  json rows = json::array();
  json prov = json::array();
  for (std::size_t i = 0; i < m.n(); ++i) {
    std::string bits;
    json p = json::array();
    for (std::size_t j = 0; j < m.k(); ++j) {
      bits += m.at(i, j) ? '1' : '0';
      p.push_back(to_string(m.provenance_at(i, j)));
    }
    rows.push_back(bits);
    prov.push_back(p);
  }
  json j = {{"schema", "specsva/matrix"}, {"version", 1},  {"assertions", m.assertions},
            {"mutants", m.mutants},       {"rows", rows},  {"provenance", prov}};
  return j.dump(2) + "\n";
}

DetectionMatrix matrix_from_json(std::string_view text) {
  try {
    auto j = json::parse(text);
    DetectionMatrix m(j.at("assertions").get<std::vector<std::string>>(), j.at("mutants").get<std::vector<std::string>>());
    const auto& rows = j.at("rows");
    const auto& prov = j.at("provenance");
    if (rows.size() != m.n()) throw Error(ErrorKind::SyntaxError, "matrix row count does not match assertion ids");
    for (std::size_t i = 0; i < m.n(); ++i) {
      auto bits = rows[i].get<std::string>();
      if (bits.size() != m.k()) throw Error(ErrorKind::SyntaxError, "matrix row width does not match mutant ids");
      for (std::size_t c = 0; c < m.k(); ++c) {
        auto p = prov.at(i).at(c).get<std::string>();
        Provenance pv = p == "external" ? Provenance::External
                        : p == "skipped" ? Provenance::Skipped
                                         : Provenance::Simulated;
        m.set(i, c, bits[c] == '1', pv);
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SyntaxError, fmt::format("bad matrix file: {}", e.what()));
  }
}

std::string witness_text(const Witness& w, std::string_view title) {
  std::string out = fmt::format("# {}\n# first failing start cycle: {}\n", title, w.fail_cycle);
  return out + write_trace(w.trace);
}

void write_witnesses(const std::filesystem::path& dir, const MatrixResult& result) {
  for (const auto& [cell, w] : result.witnesses) {
    const auto& aid = result.matrix.assertions[cell.first];
    const auto& mid = result.matrix.mutants[cell.second];
    util::write_file(dir / fmt::format("{}__{}.trace", aid, mid),
                     witness_text(w, fmt::format("assertion {} fails on mutant {}", aid, mid)));
  }
}

void emit_external_job(const SvaAst& assertion, const RtlModule& rtl, const std::filesystem::path& outdir,
                       std::size_t depth) {
  std::string props = fmt::format("module {}_props (\n", rtl.name);
  std::vector<std::string> ports;
  for (const auto& s : rtl.signals)
    ports.push_back(fmt::format("  input {}{}", s.width == 1 ? "" : fmt::format("[{}:0] ", s.width - 1), s.name));
  props += util::join(ports, ",\n") + "\n);\n";
  for (const auto& p : rtl.params)
    props += fmt::format("  localparam {}{} = {};\n", p.width == 32 ? "" : fmt::format("[{}:0] ", p.width - 1),
                         p.name, p.value);
  SvaAst labelled = assertion;
  if (labelled.label.empty()) labelled.label = "checked";
  props += "  " + render_sva(labelled) + "\n";
  props += "endmodule\n\n";
  props += fmt::format("bind {0} {0}_props props_i (.*);\n", rtl.name);

  std::string sby = fmt::format(
      "[options]\n"
      "mode bmc\n"
      "depth {}\n"
      "\n"
      "[engines]\n"
      "smtbmc\n"
      "\n"
      "[script]\n"
      "read -formal design.v\n"
      "read -formal props.sv\n"
      "prep -top {}\n"
      "\n"
      "[files]\n"
      "design.v\n"
      "props.sv\n",
      depth, rtl.name);

  util::write_file(outdir / "design.v", render_rtl(rtl));
  util::write_file(outdir / "props.sv", props);
  util::write_file(outdir / "job.sby", sby);
}

}  // namespace specsva
