#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aitk/aitk.h"
#include "doctest.h"

namespace {

std::vector<std::string> take(aitk_strings* list) {
    std::vector<std::string> out;
    for (size_t i = 0; i < aitk_strings_size(list); ++i) out.emplace_back(aitk_strings_at(list, i));
    aitk_strings_free(list);
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string render(const aitk_expr* e) {
    size_t needed = 0;
    REQUIRE(aitk_expr_render(e, nullptr, 0, &needed) == AITK_OK);
    std::string s(needed + 1, '\0');
    REQUIRE(aitk_expr_render(e, s.data(), s.size(), nullptr) == AITK_OK);
    s.resize(needed);
    return s;
}

double number(const aitk_report* r, const char* key) {
    const char* v = aitk_report_get(r, key);
    REQUIRE(v != nullptr);
    return std::strtod(v, nullptr);
}

const std::string kTables = AITK_TABLE_DIR;
const std::string kData = AITK_DATA_DIR;

}  // namespace

TEST_CASE("version and error plumbing") {
    CHECK(std::string(aitk_version()) == "1.0.0");
    aitk_expr* e = nullptr;
    CHECK(aitk_expr_parse("sig(", &e) == AITK_E_PARSE);
    CHECK(e == nullptr);
    CHECK(std::strlen(aitk_last_error()) > 0);
    CHECK(aitk_expr_parse(nullptr, &e) == AITK_E_INVALID_ARGUMENT);
    CHECK(aitk_expr_parse("sig(m1)", nullptr) == AITK_E_INVALID_ARGUMENT);
    aitk_expr_free(nullptr);
    aitk_strings_free(nullptr);
    aitk_report_free(nullptr);
    aitk_model_free(nullptr);
    CHECK(aitk_strings_size(nullptr) == 0);
    CHECK(aitk_report_get(nullptr, "x") == nullptr);
}

TEST_CASE("expressions") {
    aitk_expr* e = nullptr;
    REQUIRE(aitk_expr_parse("sig tau(m2, m1)", &e) == AITK_OK);
    CHECK(render(e) == "sig tau(m1, m2)");

    char small[4];
    size_t needed = 0;
    CHECK(aitk_expr_render(e, small, sizeof small, &needed) == AITK_OK);
    CHECK(needed == std::strlen("sig tau(m1, m2)"));
    CHECK(std::string(small) == "sig");

    int depth = -1;
    CHECK(aitk_expr_depth(e, &depth) == AITK_OK);
    CHECK(depth == 1);
    unsigned rank = 0;
    CHECK(aitk_expr_rank(e, nullptr, &rank) == AITK_OK);
    CHECK(rank == 1);
    aitk_expr* lifted = nullptr;
    REQUIRE(aitk_expr_parse("sig^(1) tau(m1, m2)", &lifted) == AITK_OK);
    CHECK(aitk_expr_rank(lifted, nullptr, &rank) == AITK_OK);
    CHECK(rank == 2);
    aitk_expr_free(lifted);

    aitk_expr* m = nullptr;
    REQUIRE(aitk_expr_parse("sig(m1)", &m) == AITK_OK);
    aitk_expr* product = nullptr;
    REQUIRE(aitk_expr_multiply(m, m, &product) == AITK_OK);
    CHECK(render(product) == "sig tau(m1)");
    int prime = -1;
    CHECK(aitk_expr_is_prime(m, &prime) == AITK_OK);
    CHECK(prime == 1);
    CHECK(aitk_expr_is_prime(product, &prime) == AITK_OK);
    CHECK(prime == 0);
    aitk_strings* factors = nullptr;
    REQUIRE(aitk_expr_factor(product, &factors) == AITK_OK);
    CHECK(take(factors) == std::vector<std::string>{"sig(m1)", "sig(m1)"});

    aitk_expr* deep = nullptr;
    REQUIRE(aitk_expr_parse("sig tau phi(m1)", &deep) == AITK_OK);
    aitk_expr* bad = nullptr;
    CHECK(aitk_expr_multiply(deep, m, &bad) == AITK_E_COMPOSITION);
    CHECK(bad == nullptr);

    aitk_expr_free(deep);
    aitk_expr_free(product);
    aitk_expr_free(m);
    aitk_expr_free(e);
}

TEST_CASE("models") {
    aitk_model* shipped = nullptr;
    REQUIRE(aitk_model_shipped(&shipped) == AITK_OK);
    aitk_strings* lines = nullptr;
    REQUIRE(aitk_model_render(shipped, &lines) == AITK_OK);
    const auto rendered = take(lines);
    CHECK_FALSE(rendered.empty());

    std::string text;
    for (const auto& l : rendered) text += l + "\n";
    aitk_model* reparsed = nullptr;
    REQUIRE(aitk_model_parse(text.c_str(), &reparsed) == AITK_OK);
    REQUIRE(aitk_model_render(reparsed, &lines) == AITK_OK);
    CHECK(take(lines) == rendered);

    aitk_model* loaded = nullptr;
    REQUIRE(aitk_model_load((kData + "/shipped.model").c_str(), &loaded) == AITK_OK);
    REQUIRE(aitk_model_render(loaded, &lines) == AITK_OK);
    CHECK(take(lines) == rendered);

    aitk_model* missing = nullptr;
    CHECK(aitk_model_load("/nonexistent/model", &missing) == AITK_E_IO);
    CHECK(aitk_model_parse("no equals sign\n", &missing) == AITK_E_CONFIG);
    CHECK(missing == nullptr);

    aitk_model_free(loaded);
    aitk_model_free(reparsed);
    aitk_model_free(shipped);
}

TEST_CASE("enumeration counts") {
    size_t n = 0;
    CHECK(aitk_count_by_rank(1, nullptr, &n) == AITK_OK);
    CHECK(n == 3);
    CHECK(aitk_count_by_rank(2, nullptr, &n) == AITK_OK);
    CHECK(n == 11);
    CHECK(aitk_count_by_rank(3, nullptr, &n) == AITK_OK);
    CHECK(n == 42);
    CHECK(aitk_total_multiplicity(1, nullptr, &n) == AITK_OK);
    CHECK(n == 12);
    CHECK(aitk_total_multiplicity(2, nullptr, &n) == AITK_OK);
    CHECK(n == 54);

    aitk_strings* list = nullptr;
    REQUIRE(aitk_partitions(3, &list) == AITK_OK);
    CHECK(take(list).size() == 3);
    CHECK(aitk_partitions(0, &list) == AITK_E_INVALID_ARGUMENT);

    REQUIRE(aitk_enumerate(0, nullptr, nullptr, &list) == AITK_OK);
    CHECK(take(list).size() == 3);
    REQUIRE(aitk_enumerate(1, nullptr, nullptr, &list) == AITK_OK);
    CHECK(take(list).size() == 11);
    REQUIRE(aitk_enumerate(2, nullptr, nullptr, &list) == AITK_OK);
    CHECK(take(list).size() == 42);
    REQUIRE(aitk_enumerate(1, "1,1", nullptr, &list) == AITK_OK);
    const auto groves = take(list);
    REQUIRE_FALSE(groves.empty());
    CHECK(groves[0].find(" | ") != std::string::npos);
    CHECK(aitk_enumerate(1, "3", nullptr, &list) == AITK_E_INVALID_ARGUMENT);
    CHECK(aitk_enumerate(3, nullptr, nullptr, &list) == AITK_E_INVALID_ARGUMENT);

    REQUIRE(aitk_situations(1, &list) == AITK_OK);
    CHECK(take(list).size() == 3);
    REQUIRE(aitk_situations(2, &list) == AITK_OK);
    CHECK(take(list).size() == 11);
    REQUIRE(aitk_situations(3, &list) == AITK_OK);
    CHECK(take(list).size() == 20);
    REQUIRE(aitk_situations(0, &list) == AITK_OK);
    CHECK(take(list).size() == 1);
}

TEST_CASE("table verification") {
    aitk_report* r = nullptr;
    for (int t : {0, 1}) {
        REQUIRE(aitk_verify_table(t, (kTables + "/table" + std::to_string(t) + ".txt").c_str(), nullptr, 0, &r) == AITK_OK);
        CHECK(std::string(aitk_report_get(r, "exact")) == "true");
        CHECK(std::string(aitk_report_get(r, "acceptable")) == "true");
        aitk_report_free(r);
    }
    REQUIRE(aitk_verify_table(2, (kTables + "/table2.txt").c_str(), nullptr, 0, &r) == AITK_OK);
    CHECK(std::string(aitk_report_get(r, "exact")) == "false");
    CHECK(std::string(aitk_report_get(r, "confined_to_exceptions")) == "true");
    CHECK(std::string(aitk_report_get(r, "acceptable")) == "true");
    CHECK(std::string(aitk_report_get(r, "missing")) == "1");
    CHECK(std::string(aitk_report_get(r, "extra")) == "1");
    REQUIRE(aitk_report_doc_count(r) == 2);
    CHECK(std::string(aitk_report_doc_name(r, 0)) == "produced.txt");
    CHECK(std::string(aitk_report_doc_name(r, 1)) == "diff.txt");
    CHECK(aitk_report_doc_name(r, 2) == nullptr);
    bool found = false;
    for (size_t i = 0; i < aitk_report_size(r); ++i) found = found || std::string(aitk_report_key(r, i)) == "table.hash";
    CHECK(found);
    aitk_report_free(r);

    REQUIRE(aitk_verify_table(2, (kTables + "/table2.txt").c_str(), nullptr, 1, &r) == AITK_OK);
    CHECK(std::string(aitk_report_get(r, "exact")) == "true");
    CHECK(std::string(aitk_report_get(r, "exceptions_applied")) == "1");
    aitk_report_free(r);

    r = nullptr;
    CHECK(aitk_verify_table(5, (kTables + "/table2.txt").c_str(), nullptr, 0, &r) == AITK_E_INVALID_ARGUMENT);
    CHECK(r == nullptr);
    CHECK(aitk_verify_table(1, "/nonexistent", nullptr, 0, &r) == AITK_E_IO);
}

TEST_CASE("information runs") {
    aitk_report* r = nullptr;
    REQUIRE(aitk_run_info(slurp(kData + "/configs/gaussian.cfg").c_str(), &r) == AITK_OK);
    CHECK(number(r, "information.x") == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(number(r, "analytic_information") == 4.0);
    CHECK(aitk_report_doc_count(r) == 1);
    aitk_report_free(r);

    REQUIRE(aitk_run_info(slurp(kData + "/configs/nested.cfg").c_str(), &r) == AITK_OK);
    CHECK(number(r, "integral") == doctest::Approx(1.0).epsilon(1e-6));
    aitk_report_free(r);

    CHECK(aitk_run_info("kind = hologram\n", &r) == AITK_E_CONFIG);
    CHECK(aitk_run_info("kind = gaussian\nsd = -1\n", &r) != AITK_OK);
}

TEST_CASE("critical-point runs") {
    aitk_report* r = nullptr;
    REQUIRE(aitk_run_critical(slurp(kData + "/configs/quadratic.cfg").c_str(), 3, &r) == AITK_OK);
    CHECK(std::string(aitk_report_get(r, "seed")) == "3");
    CHECK(number(r, "residual") < 1e-8);
    REQUIRE(aitk_report_doc_count(r) == 1);
    CHECK(std::string(aitk_report_doc_text(r, 0)).rfind("# seed=3\n", 0) == 0);
    aitk_report_free(r);

    r = nullptr;
    const std::string capped = slurp(kData + "/configs/rosenbrock.cfg") + "max_iterations = 5\n";
    CHECK(aitk_run_critical(capped.c_str(), 1, &r) == AITK_E_NOT_CONVERGED);
    REQUIRE(r != nullptr);
    CHECK(number(r, "residual") > 1e-6);
    CHECK(aitk_report_get(r, "theta") != nullptr);
    aitk_report_free(r);

    r = nullptr;
    CHECK(aitk_run_critical("functional = nothing\n", 1, &r) == AITK_E_CONFIG);
    CHECK(r == nullptr);
}

TEST_CASE("geodesic runs") {
    aitk_report* r = nullptr;
    REQUIRE(aitk_run_geodesic(slurp(kData + "/configs/euclidean.cfg").c_str(), &r) == AITK_OK);
    const std::string end = aitk_report_get(r, "endpoint");
    char* rest = nullptr;
    CHECK(std::strtod(end.c_str(), &rest) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::strtod(rest + 1, nullptr) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(number(r, "energy_relative_drift") < 1e-12);
    aitk_report_free(r);

    REQUIRE(aitk_run_geodesic(slurp(kData + "/configs/sphere.cfg").c_str(), &r) == AITK_OK);
    CHECK(number(r, "energy_relative_drift") < 1e-3);
    aitk_report_free(r);

    REQUIRE(aitk_run_geodesic(slurp(kData + "/configs/policy.cfg").c_str(), &r) == AITK_OK);
    CHECK(std::string(aitk_report_get(r, "group_order")) == "8");
    CHECK(number(r, "policy_information") == doctest::Approx(100.0).epsilon(1e-3));
    aitk_report_free(r);

    r = nullptr;
    CHECK(aitk_run_geodesic("metric = constant\nmatrix = 1,0,0,-1\nstart = 0,0\nvelocity = 1,0\n", &r) == AITK_E_NUMERIC);
}

TEST_CASE("simulation and optimization runs") {
    const std::string baseline = slurp(kData + "/scenarios/baseline.cfg");
    aitk_report* a = nullptr;
    aitk_report* b = nullptr;
    REQUIRE(aitk_simulate(baseline.c_str(), 4, -1, nullptr, &a) == AITK_OK);
    REQUIRE(aitk_simulate(baseline.c_str(), 4, -1, nullptr, &b) == AITK_OK);
    CHECK(std::string(aitk_report_doc_text(a, 0)) == aitk_report_doc_text(b, 0));
    CHECK(std::string(aitk_report_get(a, "seed")) == "4");
    CHECK(number(a, "depletion_round") > 0);
    aitk_report_free(a);
    aitk_report_free(b);

    REQUIRE(aitk_simulate(baseline.c_str(), 1, 0, nullptr, &a) == AITK_OK);
    CHECK(number(a, "welfare") == 0.0);
    aitk_report_free(a);

    CHECK(aitk_simulate(baseline.c_str(), 1, -1, "tyranny", &a) == AITK_E_CONFIG);
    CHECK(aitk_simulate("agents = 0\n", 1, -1, nullptr, &a) == AITK_E_CONFIG);

    const std::string cfg = slurp(kData + "/scenarios/slack_a.cfg") + "optimize.seeds = 1,2\nrounds = 100\n";
    REQUIRE(aitk_optimize(cfg.c_str(), 1, nullptr, &a) == AITK_OK);
    CHECK(aitk_report_get(a, "best.slack") != nullptr);
    CHECK(number(a, "best_mean_welfare") >= number(a, "baseline_mean_welfare"));
    CHECK(aitk_report_doc_count(a) == 4);
    aitk_report_free(a);
}
