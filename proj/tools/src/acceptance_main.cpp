// Runs the acceptance criteria and prints one pass/fail line per criterion.
#include "cbtau_tools/acceptance.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>

using namespace cbtau::tools;

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria"};
    AcceptanceOptions opts;
    std::vector<int> ids = all_criteria();
    bool verbose = false;
    app.add_flag("--quick", opts.quick, "smaller fast-scheme orders");
    app.add_option("--criteria", ids, "criteria to run")->delimiter(',')->check(CLI::Range(1, 9));
    app.add_option("--seed", opts.seed, "seed for the random parameter points");
    app.add_flag("-v,--verbose", verbose, "print every sub-check");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (const char* env = std::getenv("CBTAU_THREADS")) opts.threads = static_cast<unsigned>(std::max(1, std::atoi(env)));

    bool all = true;
    for (int id : ids) {
        CriterionResult r = run_criterion(id, opts);
        all = all && r.pass;
        std::printf("criterion %d: %s  %s (%.1f s)\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
        for (const auto& d : r.details)
            if (verbose || d.rfind("FAIL", 0) == 0) std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
