// analyze.hpp - the three contract analyses and their reports.
//
// run_analysis drives performability, execution and limitation queries over
// a ContractModel. Every witness is re-evaluated and every core re-checked
// UNSAT before it is reported; core assertions are mapped back to the source
// blocks they came from. render_report turns the result into text or JSON.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "contractcheck/encode.hpp"
#include "contractcheck/smtlib.hpp"
#include "contractcheck/solve.hpp"

namespace contractcheck {

// ── report types ────────────────────────────────────────────────────────────

enum class AnalysisKind { Performability, Consequence, Limitation };
enum class Verdict { Performable, NotPerformable, DefectFound, NoDefect, ResourceLimit };
enum class ExecVerdict { Executable, NotExecutable, ResourceLimit };

inline const char* verdict_key(Verdict v) {
    switch (v) {
        case Verdict::Performable: return "performable";
        case Verdict::NotPerformable: return "not_performable";
        case Verdict::DefectFound: return "defect_found";
        case Verdict::NoDefect: return "no_defect";
        case Verdict::ResourceLimit: return "resource_limit";
    }
    return "?";
}

inline const char* exec_verdict_key(ExecVerdict v) {
    switch (v) {
        case ExecVerdict::Executable: return "executable";
        case ExecVerdict::NotExecutable: return "not_executable";
        case ExecVerdict::ResourceLimit: return "resource_limit";
    }
    return "?";
}

struct CoreBlock {
    std::string assertion;  // hard-assertion name
    std::string block;      // id of the source block it encodes
    SourceSpan span;
};

struct ClaimVerdict {
    std::string claim;
    AnalysisKind analysis = AnalysisKind::Performability;
    Verdict verdict = Verdict::Performable;
    std::optional<Assignment> witness;     // Performable / DefectFound
    std::vector<CoreBlock> core_blocks;    // NotPerformable
    long long witness_assert_day = -1;     // limitation DefectFound: minimal breach day
};

struct TimelineEntry {
    long long day = 0;
    std::string claim;
    std::string event;  // performed | asserted | compensated | restituted
};

struct ExecutionReport {
    ExecVerdict verdict = ExecVerdict::Executable;
    std::vector<std::string> soft_satisfied;
    std::vector<std::string> soft_violated;
    std::vector<TimelineEntry> timeline;  // day ascending, document order on ties
    std::vector<std::pair<std::string, std::string>> idle;  // claim, "not performed" etc.
    std::optional<Assignment> model;
    std::vector<CoreBlock> core_blocks;   // NotExecutable evidence
};

struct AnalysisReport {
    std::string contract;
    long long horizon = 0;
    bool ran_performability = false;
    bool ran_limitation = false;
    std::vector<ClaimVerdict> performability;  // every claim, document order
    std::optional<ExecutionReport> execution;
    std::vector<ClaimVerdict> limitation;      // Performance/Compensation claims only
    std::vector<std::string> warnings;
};

enum class Analysis { Performability, Execution, Limitation, All };
enum class SolverBackend { Builtin, External };
enum class ReportFormat { Text, Json };

struct AnalyzeOptions {
    SolverBackend backend = SolverBackend::Builtin;
    std::string solver_command;  // External only
    long long limit = kDefaultSolveLimit;
    std::string emit_dir;  // when nonempty, one .smt2 script per query lands here
};

namespace detail {

inline const char* event_label(ClaimKind k) {
    switch (k) {
        case ClaimKind::Warranty: return "asserted";
        case ClaimKind::Compensation: return "compensated";
        case ClaimKind::Restitution: return "restituted";
        default: return "performed";  // Transfer, Pay, Performance
    }
}

// Copy of s with only the named hard assertions (softs dropped, declarations
// kept so restricted sets stay solvable and evaluable).
inline AssertionSet keep_hard(const AssertionSet& s, const std::vector<std::string>& names) {
    AssertionSet out;
    out.var_domains = s.var_domains;
    out.functions = s.functions;
    out.sorts = s.sorts;
    for (const auto& a : s.hard)
        if (std::find(names.begin(), names.end(), a.name) != names.end())
            out.hard.push_back(a);
    return out;
}

// Backend-agnostic solving facade.
struct Driver {
    SolverBackend backend = SolverBackend::Builtin;
    std::string cmd;
    long long limit = kDefaultSolveLimit;

    SolveResult decide(const AssertionSet& s) const {
        return backend == SolverBackend::Builtin ? solve_bounded(s, limit)
                                                 : run_external(cmd, s);
    }
    SolveResult best(const AssertionSet& s) const {
        return backend == SolverBackend::Builtin ? maximize_soft(s, limit)
                                                 : run_external(cmd, s);
    }

    // Normalizes refusal evidence to a 1-minimal core. Built-in results
    // arrive minimized already; external cores are solver-verbatim, so they
    // are intersected with the declared names and shrunk by deletion.
    std::vector<std::string> shrink(const AssertionSet& s,
                                    std::vector<std::string> core) const {
        if (backend == SolverBackend::Builtin) return core;
        std::vector<std::string> names;
        for (const auto& a : s.hard)
            if (std::find(core.begin(), core.end(), a.name) != core.end())
                names.push_back(a.name);
        if (names.empty() || decide(keep_hard(s, names)).is_sat) {
            names.clear();  // unusable core; restart from the full set
            for (const auto& a : s.hard) names.push_back(a.name);
        }
        for (size_t i = 0; i < names.size();) {
            auto rest = names;
            rest.erase(rest.begin() + static_cast<long>(i));
            if (!decide(keep_hard(s, rest)).is_sat)
                names = std::move(rest);
            else
                ++i;
        }
        return names;
    }
};

inline void check_model(const AssertionSet& s, const Assignment& a) {
    for (const auto& h : s.hard)
        if (!evaluate_formula(h.formula, a))
            throw InternalError("reported model violates " + h.name);
}

// Refusal evidence: minimize, re-verify UNSAT, map to source blocks.
inline std::vector<CoreBlock> refusal_blocks(const ContractModel& m, const Driver& drv,
                                             const AssertionSet& s,
                                             std::vector<std::string> core) {
    core = drv.shrink(s, std::move(core));
    if (drv.decide(keep_hard(s, core)).is_sat)
        throw InternalError("unsat core failed re-verification");
    std::vector<CoreBlock> out;
    for (const auto& h : s.hard)
        if (std::find(core.begin(), core.end(), h.name) != core.end())
            out.push_back({h.name, h.block_id, m.block_span.at(h.block_id)});
    return out;
}

struct Emitter {
    std::filesystem::path dir;
    bool active = false;

    void write(const std::string& analysis, const std::string& id,
               const AssertionSet& s) const {
        if (!active) return;
        auto path = dir / (analysis + "." + id + ".smt2");
        std::ofstream out(path);
        out << emit_smtlib(s);
        if (!out) throw InternalError("cannot write " + path.string());
    }
};

}  // namespace detail

// ── analysis driver ─────────────────────────────────────────────────────────

inline AnalysisReport run_analysis(const ContractModel& m, Analysis which,
                                   const AnalyzeOptions& opts = {}) {
    detail::Driver drv{opts.backend, opts.solver_command, opts.limit};
    detail::Emitter emit{opts.emit_dir, !opts.emit_dir.empty()};
    if (emit.active) std::filesystem::create_directories(emit.dir);

    AnalysisReport r;
    r.contract = m.source_name.empty() ? "<input>" : m.source_name;
    r.horizon = m.horizon;
    bool all = which == Analysis::All;

    // A ResourceLimit in one query is reported inline; the others still run.
    if (all || which == Analysis::Performability) {
        r.ran_performability = true;
        for (const auto& c : m.claims) {
            bool primary = detail::Encoder::is_primary(c);
            AssertionSet q =
                primary ? encode_performability(m, c.id) : encode_consequence(m, c.id);
            emit.write("performability", c.id, q);
            ClaimVerdict v;
            v.claim = c.id;
            v.analysis = primary ? AnalysisKind::Performability : AnalysisKind::Consequence;
            try {
                SolveResult res = drv.decide(q);
                if (res.is_sat) {
                    detail::check_model(q, res.model);
                    v.verdict = Verdict::Performable;
                    v.witness = std::move(res.model);
                } else {
                    v.verdict = Verdict::NotPerformable;
                    v.core_blocks = detail::refusal_blocks(m, drv, q, std::move(res.core));
                }
            } catch (const ResourceLimitError&) {
                v.verdict = Verdict::ResourceLimit;
            }
            r.performability.push_back(std::move(v));
        }
    }

    if (all || which == Analysis::Execution) {
        AssertionSet q = encode_spa(m);
        emit.write("execution", "contract", q);
        ExecutionReport ex;
        try {
            SolveResult res = drv.best(q);
            if (res.is_sat) {
                detail::check_model(q, res.model);
                ex.verdict = ExecVerdict::Executable;
                ex.soft_satisfied = res.soft_satisfied;
                for (const auto& w : q.soft)
                    if (std::find(ex.soft_satisfied.begin(), ex.soft_satisfied.end(),
                                  w.name) == ex.soft_satisfied.end())
                        ex.soft_violated.push_back(w.name);
                for (const auto& c : m.claims) {
                    long long day = res.model.ints.at(c.day_var);
                    const char* label = detail::event_label(c.kind);
                    if (day >= 0)
                        ex.timeline.push_back({day, c.id, label});
                    else
                        ex.idle.emplace_back(c.id, std::string("not ") + label);
                }
                std::stable_sort(ex.timeline.begin(), ex.timeline.end(),
                                 [](const TimelineEntry& a, const TimelineEntry& b) {
                                     return a.day < b.day;
                                 });
                ex.model = std::move(res.model);
            } else {
                ex.verdict = ExecVerdict::NotExecutable;
                ex.core_blocks = detail::refusal_blocks(m, drv, q, std::move(res.core));
            }
        } catch (const ResourceLimitError&) {
            ex.verdict = ExecVerdict::ResourceLimit;
        }
        r.execution = std::move(ex);
    }

    if (all || which == Analysis::Limitation) {
        r.ran_limitation = true;
        for (const auto& c : m.claims) {
            if (c.kind != ClaimKind::Performance && c.kind != ClaimKind::Compensation)
                continue;
            AssertionSet q = encode_limitation(m, c.id);
            emit.write("limitation", c.id, q);
            ClaimVerdict v;
            v.claim = c.id;
            v.analysis = AnalysisKind::Limitation;
            try {
                SolveResult res = drv.decide(q);
                if (res.is_sat) {
                    detail::check_model(q, res.model);
                    v.verdict = Verdict::DefectFound;
                    // The built-in search tries days ascending, so this is the
                    // earliest assert day that escapes the limitation period.
                    v.witness_assert_day =
                        res.model.ints.at(m.find_claim(*c.primary)->day_var);
                    v.witness = std::move(res.model);
                } else {
                    v.verdict = Verdict::NoDefect;
                }
            } catch (const ResourceLimitError&) {
                v.verdict = Verdict::ResourceLimit;
            }
            r.limitation.push_back(std::move(v));
        }
    }

    if (r.execution && r.execution->verdict == ExecVerdict::Executable) {
        std::string stuck;
        for (const auto& v : r.performability)
            if (v.verdict == Verdict::NotPerformable)
                stuck += (stuck.empty() ? "" : ", ") + v.claim;
        if (!stuck.empty())
            r.warnings.push_back("inconsistent yet executable: " + stuck +
                                 " can never be performed, but an execution of the "
                                 "remaining terms exists");
    }
    return r;
}

// 0 all clean, 1 any refusal or defect, 3 any aborted sub-analysis. Usage and
// input errors return 2 from run_cli before a report exists.
inline int report_exit_code(const AnalysisReport& r) {
    bool bad = false, aborted = false;
    auto look = [&](const ClaimVerdict& v) {
        bad |= v.verdict == Verdict::NotPerformable || v.verdict == Verdict::DefectFound;
        aborted |= v.verdict == Verdict::ResourceLimit;
    };
    for (const auto& v : r.performability) look(v);
    for (const auto& v : r.limitation) look(v);
    if (r.execution) {
        bad |= r.execution->verdict == ExecVerdict::NotExecutable;
        aborted |= r.execution->verdict == ExecVerdict::ResourceLimit;
    }
    return aborted ? 3 : bad ? 1 : 0;
}

// ── rendering ───────────────────────────────────────────────────────────────

namespace detail {

inline std::string spell(std::string key) {  // "not_performable" → "not performable"
    std::replace(key.begin(), key.end(), '_', ' ');
    return key;
}

inline nlohmann::ordered_json witness_json(const Assignment& a) {
    auto w = nlohmann::ordered_json::object();
    for (const auto& [name, value] : a.ints) w[name] = value;
    for (const auto& [name, value] : a.members) w[name] = value;
    for (const auto& [key, value] : a.fun) w[key.first + "(" + key.second + ")"] = value;
    return w;
}

inline nlohmann::ordered_json core_json(const std::vector<CoreBlock>& core) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& cb : core)
        arr.push_back({{"assertion", cb.assertion},
                       {"block", cb.block},
                       {"line_start", cb.span.line_start},
                       {"line_end", cb.span.line_end}});
    return arr;
}

inline nlohmann::ordered_json claim_json(const ClaimVerdict& v) {
    auto j = nlohmann::ordered_json::object();
    j["verdict"] = verdict_key(v.verdict);
    if (v.analysis == AnalysisKind::Limitation) {
        if (v.verdict == Verdict::DefectFound) j["witness_assert_day"] = v.witness_assert_day;
        return j;
    }
    if (v.witness) j["witness"] = witness_json(*v.witness);
    if (!v.core_blocks.empty()) j["core_blocks"] = core_json(v.core_blocks);
    return j;
}

inline std::string render_json(const AnalysisReport& r) {
    nlohmann::ordered_json j;
    j["contract"] = r.contract;
    j["horizon"] = r.horizon;
    auto& an = j["analyses"] = nlohmann::ordered_json::object();
    if (r.ran_performability) {
        auto& p = an["performability"] = nlohmann::ordered_json::object();
        for (const auto& v : r.performability) p[v.claim] = claim_json(v);
    }
    if (r.execution) {
        const ExecutionReport& ex = *r.execution;
        auto& e = an["execution"] = nlohmann::ordered_json::object();
        e["verdict"] = exec_verdict_key(ex.verdict);
        e["soft_satisfied"] = ex.soft_satisfied;
        e["soft_violated"] = ex.soft_violated;
        auto& tl = e["timeline"] = nlohmann::ordered_json::array();
        for (const auto& t : ex.timeline)
            tl.push_back({{"day", t.day}, {"claim", t.claim}, {"event", t.event}});
    }
    if (r.ran_limitation) {
        auto& l = an["limitation"] = nlohmann::ordered_json::object();
        for (const auto& v : r.limitation) l[v.claim] = claim_json(v);
    }
    j["warnings"] = r.warnings;
    return j.dump(2) + "\n";
}

inline std::string render_text(const AnalysisReport& r) {
    std::ostringstream out;
    out << "contract: " << r.contract << "\n";
    out << "horizon: " << r.horizon << "\n";

    if (r.ran_performability || r.execution || r.ran_limitation) {
        out << "\nverdicts:\n";
        for (const auto& v : r.performability)
            out << "  " << v.claim << ": " << spell(verdict_key(v.verdict)) << "\n";
        if (r.execution) {
            const ExecutionReport& ex = *r.execution;
            out << "  execution: " << spell(exec_verdict_key(ex.verdict));
            if (ex.verdict == ExecVerdict::Executable)
                out << " (" << ex.soft_satisfied.size() << " of "
                    << ex.soft_satisfied.size() + ex.soft_violated.size() << " wishes)";
            out << "\n";
        }
        for (const auto& v : r.limitation) {
            out << "  " << v.claim << " limitation: " << spell(verdict_key(v.verdict));
            if (v.verdict == Verdict::DefectFound)
                out << " (assert day " << v.witness_assert_day << ")";
            out << "\n";
        }
    }

    if (r.execution && r.execution->verdict == ExecVerdict::Executable) {
        out << "\ntimeline:\n";
        for (const auto& t : r.execution->timeline)
            out << "  day " << t.day << ": " << t.claim << " " << t.event << "\n";
        for (const auto& [claim, status] : r.execution->idle)
            out << "  " << claim << ": " << status << "\n";
    }

    bool any_core = r.execution && !r.execution->core_blocks.empty();
    for (const auto& v : r.performability) any_core |= !v.core_blocks.empty();
    if (any_core) {
        out << "\ncores:\n";
        auto dump = [&](const std::string& label, const std::vector<CoreBlock>& core) {
            if (core.empty()) return;
            out << "  " << label << ":\n";
            for (const auto& cb : core)
                out << "    " << cb.assertion << "  (block " << cb.block << ", lines "
                    << cb.span.line_start << "-" << cb.span.line_end << ")\n";
        };
        for (const auto& v : r.performability) dump(v.claim, v.core_blocks);
        if (r.execution) dump("execution", r.execution->core_blocks);
    }

    if (!r.warnings.empty()) {
        out << "\nwarnings:\n";
        for (const auto& w : r.warnings) out << "  " << w << "\n";
    }
    return out.str();
}

}  // namespace detail

inline std::string render_report(const AnalysisReport& r, ReportFormat format) {
    return format == ReportFormat::Json ? detail::render_json(r) : detail::render_text(r);
}

}  // namespace contractcheck
