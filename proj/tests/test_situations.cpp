#include <set>

#include "aitk/enumerator.hpp"
#include "aitk/error.hpp"
#include "aitk/situations.hpp"
#include "doctest.h"

using namespace aitk;

namespace {

std::vector<std::string> names(const std::vector<SituationExpr>& v) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(render(s));
    return out;
}

}  // namespace

TEST_CASE("order 1 gives the three lifts") {
    const auto one = names(enumerate_situations(1));
    CHECK(std::set<std::string>(one.begin(), one.end()) ==
          std::set<std::string>{"Pow Pow(A)", "Pow(A^(1))", "Pow^(1)(A)"});
}

TEST_CASE("order 2 matches the shipped list of eleven") {
    const auto ref = read_table_file(std::string(AITK_TABLE_DIR) + "/situations2.txt");
    REQUIRE(ref.size() == 11);
    const auto two = names(enumerate_situations(2));
    CHECK(std::set<std::string>(two.begin(), two.end()) == std::set<std::string>(ref.begin(), ref.end()));
    CHECK(std::set<std::string>(two.begin(), two.end()).count("Pow^(2)(A)") == 1);
    CHECK(std::set<std::string>(two.begin(), two.end()).count("Pow Pow Pow(A)") == 1);
}

TEST_CASE("order 3 is reported against the comparison target") {
    const auto three = enumerate_situations(3);
    MESSAGE("order-3 situations: " << three.size() << "");
    CHECK(three.size() == 20);
    for (const auto& s : three) CHECK(situation_order(s) == 3);
}

TEST_CASE("unbalanced tensors widen the count") {
    SituationRules loose{false};
    CHECK(enumerate_situations(1, loose).size() == 3 + 3);
    CHECK(enumerate_situations(2, loose).size() > 11);
}

TEST_CASE("parse and render round trip") {
    for (unsigned order : {1u, 2u, 3u}) {
        for (const auto& s : enumerate_situations(order)) CHECK(parse_situation(render(s)) == s);
    }
    CHECK_THROWS_AS(parse_situation("Pow(B)"), Error);
    CHECK_THROWS_AS(parse_situation("(A)"), Error);
}
