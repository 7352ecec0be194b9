#include "nldelay/delay_state.hpp"

#include <catch2/catch_test_macros.hpp>
#include <catch2/matchers/catch_matchers_floating_point.hpp>

#include <stdexcept>

using namespace nldelay;
using Catch::Matchers::WithinRel;

TEST_CASE("history returns level n - h")
{
    const std::size_t h = 3;
    DelayedState state(Level{0.0, 0.0}, h);
    CHECK(state.stored_cells() == (h + 1) * 2);

    // level n holds the value n in every cell
    for (std::size_t n = 0; n < 12; ++n) {
        CHECK(state.current()[0] == static_cast<double>(n));
        const double expected = n < h ? 0.0 : static_cast<double>(n - h);
        CHECK(state.lagged()[1] == expected);
        const double next = static_cast<double>(n + 1);
        state.push(Level{next, next});
    }
    CHECK(state.step() == 12);
    CHECK(state.stored_cells() == (h + 1) * 2);
    CHECK_THROWS_AS(state.push(Level{1.0}), std::invalid_argument);
}

TEST_CASE("zero delay reads the current level")
{
    DelayedState state(Level{0.5}, 0);
    CHECK(&state.lagged() == &state.current());
    state.push(Level{0.7});
    CHECK(state.lagged()[0] == 0.7);
    CHECK(state.stored_cells() == 1);
}

TEST_CASE("boundary extension")
{
    const Level l{1.0, 2.0, 3.0};
    CHECK(extended_value(l, -2, Boundary::FreeFlow) == 1.0);
    CHECK(extended_value(l, 5, Boundary::FreeFlow) == 3.0);
    CHECK(extended_value(l, 1, Boundary::FreeFlow) == 2.0);
    CHECK(extended_value(l, -1, Boundary::Periodic) == 3.0);
    CHECK(extended_value(l, 4, Boundary::Periodic) == 2.0);
    CHECK(extended_value(l, -4, Boundary::Periodic) == 3.0);
}

TEST_CASE("convolution speeds")
{
    const Velocity v = Velocity::normalized_greenshields();
    const KernelWeights w{{15.0, 5.0}};  // linear kernel, L = 0.1, dx = 0.05
    const double dx = 0.05;
    const Level rho{0.2, 0.4, 0.6, 0.8};

    const auto free = compute_speeds(rho, w, v, dx, Boundary::FreeFlow);
    REQUIRE(free.cells() == 4);
    CHECK(free.raw().size() == 6);
    CHECK_THAT(free.at(-1), WithinRel(1.0 - dx * (15 * 0.2 + 5 * 0.2), 1e-15));
    CHECK_THAT(free.at(0), WithinRel(1.0 - dx * (15 * 0.2 + 5 * 0.4), 1e-15));
    CHECK_THAT(free.at(2), WithinRel(1.0 - dx * (15 * 0.6 + 5 * 0.8), 1e-15));
    CHECK_THAT(free.at(3), WithinRel(1.0 - dx * (15 * 0.8 + 5 * 0.8), 1e-15));
    CHECK_THAT(free.at(4), WithinRel(1.0 - dx * (20 * 0.8), 1e-15));

    const auto per = compute_speeds(rho, w, v, dx, Boundary::Periodic);
    CHECK_THAT(per.at(-1), WithinRel(1.0 - dx * (15 * 0.8 + 5 * 0.2), 1e-15));
    CHECK_THAT(per.at(3), WithinRel(1.0 - dx * (15 * 0.8 + 5 * 0.2), 1e-15));
    CHECK_THAT(per.at(4), WithinRel(1.0 - dx * (15 * 0.2 + 5 * 0.4), 1e-15));

    SpeedField reused(1);
    compute_speeds(rho, w, v, dx, Boundary::FreeFlow, reused);
    CHECK(reused.raw() == free.raw());

    DelayedState state(rho, 2);
    state.push(Level{0.0, 0.0, 0.0, 0.0});
    CHECK(lagged_speeds(state, w, v, dx, Boundary::FreeFlow).raw() == free.raw());
}
