#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

static int run(const std::string& args, std::string* out = nullptr) {
    std::string cmd = std::string("'") + HAMFLOW_CLI_PATH + "' " + args;
    if (out) {
        cmd += " > cli_test_out.txt 2> cli_test_err.txt";
    } else {
        cmd += " > /dev/null 2>&1";
    }
    int rc = std::system(cmd.c_str());
    if (out) {
        std::ifstream is("cli_test_out.txt");
        std::stringstream ss;
        ss << is.rdbuf();
        *out = ss.str();
    }
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST_CASE("success paths exit 0") {
    CHECK(run("catalog") == 0);
    std::string out;
    CHECK(run("exponents --system hyperbolic-drift --T 20 --y0 0,0,0,0",
              &out) == 0);
    CHECK(out.find("lambda_plus") != std::string::npos);
}

TEST_CASE("usage and config errors exit 2") {
    CHECK(run("definitely-not-a-subcommand") == 2);
    CHECK(run("exponents --system no-such-system --T 1") == 2);
    CHECK(run("exponents --y0 1,2,3") == 2);  // malformed point
}

TEST_CASE("certificate failures exit 1 naming the bound") {
    // alpha far beyond the epsilon budget: the C2 bound fails
    std::string cmd = std::string("'") + HAMFLOW_CLI_PATH +
                      "' perturb-verify --alpha 0.2 --r 0.1 --nu 0.5 "
                      "--epsilon 0.01 2> cli_test_err.txt > /dev/null";
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 1);
    std::ifstream is("cli_test_err.txt");
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str().find("C2 bound") != std::string::npos);
    std::remove("cli_test_err.txt");
    std::remove("cli_test_out.txt");
}

TEST_CASE("plot-data format emits gnuplot-style columns") {
    std::string out;
    CHECK(run("exponents --system translation --T 5 --output cli_plot.txt "
              "--format plot-data --no-timestamp",
              &out) == 0);
    std::ifstream is("cli_plot.txt");
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header.rfind("# ", 0) == 0);
    CHECK(row.find(',') == std::string::npos);
    CHECK(row.find(' ') != std::string::npos);
    std::remove("cli_plot.txt");
}

TEST_CASE("HAMFLOW_SEED env fallback reaches the scan") {
    std::string f1 = "cli_seed_a.csv", f2 = "cli_seed_b.csv";
    std::string base = "surface-scan --system translation --energy 0 --n 6 "
                       "--T 2 --m-max 1 --patch-radius 0.5 --no-timestamp "
                       "--output ";
    std::string cli = std::string("'") + HAMFLOW_CLI_PATH + "' ";
    CHECK(std::system(("HAMFLOW_SEED=5 " + cli + base + f1 + " >/dev/null").c_str()) == 0);
    CHECK(std::system(("HAMFLOW_SEED=5 " + cli + base + f2 + " >/dev/null").c_str()) == 0);
    std::ifstream a(f1), b(f2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().find("Z-candidate") != std::string::npos);
    std::remove(f1.c_str());
    std::remove(f2.c_str());
}
