// cli.hpp - the `contractcheck` command-line front end.
//
// run_cli is the whole program behind tools/contractcheck.cpp; tests call it
// in-process with captured streams. Exit codes: 0 all verdicts clean, 1 some
// refusal or defect, 2 usage/parse/validation errors, 3 resource limits or an
// unusable external solver.

#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "contractcheck/analyze.hpp"

namespace contractcheck {

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
    CLI::App app{"contract consistency analyzer", "contractcheck"};
    app.require_subcommand(1);

    std::string file, analysis = "all", format = "text", backend = "builtin";
    std::string solver_cmd, emit_dir;
    long long horizon = -1, limit = kDefaultSolveLimit;

    CLI::App* check = app.add_subcommand("check", "analyze a .spa contract file");
    check->add_option("file", file, "contract file")->required();
    check->add_option("--analysis", analysis, "which analysis to run")
        ->check(CLI::IsMember({"performability", "execution", "limitation", "all"}));
    check->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    check->add_option("--backend", backend, "solver backend")
        ->check(CLI::IsMember({"builtin", "external"}));
    check->add_option("--solver-cmd", solver_cmd,
                      "external solver command reading SMT-LIB2 on stdin");
    check->add_option("--emit-smt", emit_dir,
                      "write one .smt2 script per query into this directory");
    check->add_option("--horizon", horizon, "override the contract horizon")
        ->check(CLI::NonNegativeNumber);
    check->add_option("--limit", limit, "abort a query after this many assignments")
        ->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);  // prints help or the failure message
        return code == 0 ? 0 : 2;
    }

    if (backend == "external" && solver_cmd.empty()) {
        err << "--backend external requires --solver-cmd\n";
        return 2;
    }

    std::ifstream in(file);
    if (!in) {
        err << "cannot read " << file << "\n";
        return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    BlockDocument doc;
    try {
        doc = parse_blocks(buf.str());
    } catch (const SyntaxError& e) {
        err << file << ": " << e.what() << "\n";
        return 2;
    }
    if (auto diags = validate_blocks(doc); !diags.empty()) {
        for (const auto& d : diags) {
            err << file << ":" << d.span.line_start;
            if (!d.block_id.empty()) err << " (" << d.block_id << ")";
            err << ": " << d.message << "\n";
        }
        return 2;
    }

    ContractModel m = build_model(doc);
    m.source_name = file;
    if (horizon >= 0) {
        if (horizon < m.closing_day) {
            err << "--horizon " << horizon << " is before the closing day "
                << m.closing_day << "\n";
            return 2;
        }
        m.horizon = horizon;
    }

    AnalyzeOptions opts;
    opts.backend = backend == "external" ? SolverBackend::External : SolverBackend::Builtin;
    opts.solver_command = solver_cmd;
    opts.limit = limit;
    opts.emit_dir = emit_dir;

    Analysis which = analysis == "performability" ? Analysis::Performability
                   : analysis == "execution"      ? Analysis::Execution
                   : analysis == "limitation"     ? Analysis::Limitation
                                                  : Analysis::All;

    try {
        AnalysisReport r = run_analysis(m, which, opts);
        out << render_report(r, format == "json" ? ReportFormat::Json : ReportFormat::Text);
        return report_exit_code(r);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "cannot write SMT scripts: " << e.what() << "\n";
        return 2;
    } catch (const SolverUnavailable& e) {
        err << "external solver unavailable: " << e.what() << "\n";
        return 3;
    } catch (const SolverProtocolError& e) {
        err << "external solver protocol error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace contractcheck
