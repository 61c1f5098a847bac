#include "oracles.hpp"

#include "faan/matrix_io.hpp"

#include <doctest.h>

#include <cstdio>
#include <random>
#include <sstream>

using namespace faan;

TEST_CASE("matrix CSV parse and round trip") {
    std::istringstream in("1, 2.5\n-3e-2,4\n\n");
    const Matrix m = parse_matrix_csv(in);
    REQUIRE(m.rows() == 2);
    CHECK(m(0, 1) == 2.5);
    CHECK(m(1, 0) == -0.03);

    std::mt19937_64 rng(1);
    const Matrix r = oracle::gaussian_matrix(4, 3, rng);
    std::stringstream buf;
    write_matrix_csv(buf, r);
    CHECK(parse_matrix_csv(buf) == r);
}

TEST_CASE("matrix CSV rejects ragged rows, junk and empty input") {
    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(parse_matrix_csv(ragged), std::runtime_error);
    std::istringstream junk("1,x\n");
    CHECK_THROWS_AS(parse_matrix_csv(junk), std::runtime_error);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_matrix_csv(empty), std::runtime_error);
    CHECK_THROWS_AS(read_matrix_csv("/nonexistent/m.csv"), FileError);
}

TEST_CASE("returns CSV round trip") {
    ReturnsTable t;
    t.assets = {"AAA", "BBB"};
    t.returns.resize(3, 2);
    t.returns << 0.01, -0.02, 0.0, 0.5, 1e-3, 2e-3;
    std::stringstream buf;
    write_returns_csv(buf, t);
    const ReturnsTable back = parse_returns_csv(buf);
    CHECK(back.assets == t.assets);
    CHECK(back.returns == t.returns);

    std::istringstream short_row("A,B\n1,2\n3\n");
    CHECK_THROWS_AS(parse_returns_csv(short_row), std::runtime_error);
    std::istringstream header_only("A,B\n");
    CHECK_THROWS_AS(parse_returns_csv(header_only), std::runtime_error);
}
