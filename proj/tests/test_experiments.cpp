#include <stdexcept>

#include "doctest.h"
#include "kamtori/experiments.hpp"

using namespace kamtori;

TEST_CASE("scenario registry runs and reports pass") {
    for (const auto& s : scenarios()) {
        CAPTURE(s.name);
        ExperimentReport rep = s.run(0);
        CHECK(rep.name == s.name);
        CHECK(!rep.columns.empty());
        CHECK(!rep.rows.empty());
        CHECK(!rep.properties.empty());
        CHECK(rep.all_pass());
        for (const auto& row : rep.rows) CHECK(row.size() == rep.columns.size());
    }
}

TEST_CASE("scenarios are deterministic for a fixed seed") {
    for (const char* name : {"theorem-B-density", "measure-lemma"}) {
        CAPTURE(name);
        std::string a = run_scenario(name, 7).csv();
        std::string b = run_scenario(name, 7).csv();
        CHECK(a == b);
    }
}

TEST_CASE("unknown scenario name throws") {
    CHECK_THROWS_AS(run_scenario("no-such-scenario"), std::invalid_argument);
}

TEST_CASE("csv carries header, rows, and property trailer") {
    ExperimentReport rep;
    rep.name = "demo";
    rep.columns = {"a", "b"};
    rep.rows = {{1.0, 0.5}};
    rep.properties = {{"bound", true, 0.5, 1.0}};
    std::string text = rep.csv();
    CHECK(text == "a,b\n1,0.5\n# property,bound,pass,0.5,1\n");
    CHECK(rep.all_pass());
    rep.properties.push_back({"other", false, 2.0, 1.0});
    CHECK(!rep.all_pass());
}
