#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pwdcl/simfield.hpp"

using namespace pwdcl;

TEST(Pulse, HalfAmplitudeSpectralWidthMatchesBandwidth) {
    // The spectrum of a Gaussian envelope exp(-t^2 / 2 s^2) is exp(-2 pi^2 s^2 f^2); the
    // -6 dB half-width is then sqrt(2 ln 2) / (2 pi s).
    const Pulse p{5e6, 0.7};
    const double half_width = std::sqrt(2.0 * std::numbers::ln2) / (2.0 * std::numbers::pi * p.sigma());
    EXPECT_NEAR(2.0 * half_width, 0.7 * 5e6, 1e-6);
    EXPECT_DOUBLE_EQ(p(0.0), 1.0);
    EXPECT_LT(std::abs(p(p.support())), 4e-6);
}

TEST(Pulse, Validation) {
    EXPECT_FALSE(validate(Pulse{5e6, 0.0}).empty());
    EXPECT_FALSE(validate(Pulse{-1.0, 0.7}).empty());
    EXPECT_TRUE(validate(Pulse{5e6, 0.7}).empty());
}

TEST(Simulate, EmptyPhantomGivesZeros) {
    ProbeGeometry probe;
    probe.n_elements = 8;
    Phantom ph;
    ph.empty_medium = true;
    const auto rf = simulate_rf(ph, probe, SteeringAngle{0.0}, 20e-6, Pulse{}, 1);
    EXPECT_EQ(rf.n_channels(), 8u);
    EXPECT_EQ(rf.n_samples(), 800u);
    for (double v : rf.samples.data()) EXPECT_EQ(v, 0.0);
}

TEST(Simulate, EchoPeaksAtRoundTripTime) {
    ProbeGeometry probe;
    probe.n_elements = 16;
    const auto ph = build_point_phantom({10e-3}, {1e-3});
    const auto rf = simulate_rf(ph, probe, SteeringAngle{0.1}, 30e-6, Pulse{}, 1);
    for (int e = 0; e < probe.n_elements; ++e) {
        const double tau = transmit_delay(1e-3, 10e-3, SteeringAngle{0.1}, probe.c) +
                           receive_delay(1e-3, 10e-3, probe.element_x(e), probe.c);
        const auto row = rf.samples.row(static_cast<std::size_t>(e));
        std::size_t best = 0;
        for (std::size_t n = 0; n < row.size(); ++n)
            if (row[n] > row[best]) best = n;
        EXPECT_LE(std::abs(static_cast<double>(best) - tau * probe.fs), 0.5 + 1e-9) << "element " << e;
    }
}

TEST(Simulate, LinearInAmplitudeAndSuperposition) {
    ProbeGeometry probe;
    probe.n_elements = 4;
    Phantom a, b, both;
    a.scatterers = {{0.0, 5e-3, 1.0}};
    b.scatterers = {{1e-3, 6e-3, -0.5}};
    both.scatterers = {a.scatterers[0], b.scatterers[0]};
    const auto ra = simulate_rf(a, probe, SteeringAngle{}, 12e-6, Pulse{}, 1);
    const auto rb = simulate_rf(b, probe, SteeringAngle{}, 12e-6, Pulse{}, 1);
    const auto rab = simulate_rf(both, probe, SteeringAngle{}, 12e-6, Pulse{}, 1);
    for (std::size_t k = 0; k < rab.samples.size(); ++k)
        EXPECT_NEAR(rab.samples.data()[k], ra.samples.data()[k] + rb.samples.data()[k], 1e-15);
}

TEST(Simulate, TruncationIsNoted) {
    ProbeGeometry probe;
    probe.n_elements = 4;
    const auto ph = build_point_phantom({30e-3}, {0.0});
    const auto rf = simulate_rf(ph, probe, SteeringAngle{}, 10e-6, Pulse{}, 1);
    ASSERT_FALSE(rf.notes.empty());
    EXPECT_NE(rf.notes[0].find("truncated"), std::string::npos);
}

TEST(Simulate, NonFiniteScattererRejected) {
    ProbeGeometry probe;
    Phantom ph;
    ph.scatterers = {{0.0, 5e-3, std::nan("")}};
    EXPECT_THROW(simulate_rf(ph, probe, SteeringAngle{}, 10e-6, Pulse{}, 1), InvalidArgument);
    ph.scatterers = {{0.0, 5e-3, INFINITY}};
    EXPECT_THROW(simulate_rf(ph, probe, SteeringAngle{}, 10e-6, Pulse{}, 1), InvalidArgument);
}

TEST(Simulate, NoiseIsSeeded) {
    ProbeGeometry probe;
    probe.n_elements = 4;
    Phantom ph;
    SimOptions opt;
    opt.noise_std = 0.1;
    const auto a = simulate_rf(ph, probe, SteeringAngle{}, 5e-6, Pulse{}, 9, opt);
    const auto b = simulate_rf(ph, probe, SteeringAngle{}, 5e-6, Pulse{}, 9, opt);
    const auto c = simulate_rf(ph, probe, SteeringAngle{}, 5e-6, Pulse{}, 10, opt);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_NE(a.samples, c.samples);
}

TEST(Phantoms, PointProductAndDefaults) {
    const auto ph = build_point_phantom({5e-3, 10e-3}, {-1e-3, 0.0, 1e-3});
    EXPECT_EQ(ph.scatterers.size(), 6u);
    EXPECT_EQ(default_point_phantom().scatterers.size(), 16u);
    EXPECT_THROW(build_point_phantom({}, {0.0}), InvalidArgument);
}

TEST(Phantoms, CystPhantomRespectsCystsAndCount) {
    const Bounds box{-6e-3, 6e-3, 5e-3, 17e-3};
    const auto ph = default_cyst_phantom(box, 1.5e-3, 1e7, 4);
    EXPECT_EQ(ph.cysts.size(), 9u);
    EXPECT_EQ(ph.scatterers.size(), static_cast<std::size_t>(std::llround(1e7 * box.area())));
    for (const auto& s : ph.scatterers) {
        EXPECT_TRUE(box.contains(s.x, s.z));
        for (const auto& c : ph.cysts) EXPECT_FALSE(c.contains(s.x, s.z));
    }
    const auto again = default_cyst_phantom(box, 1.5e-3, 1e7, 4);
    EXPECT_EQ(format_phantom(ph), format_phantom(again));
}

TEST(Phantoms, CystOutsideBoxRejected) {
    EXPECT_THROW(build_cyst_phantom({{0.0, 5.5e-3}}, 1e-3, 1e7, 1, {-5e-3, 5e-3, 5e-3, 10e-3}), InvalidArgument);
}

TEST(Phantoms, TextRoundTrip) {
    const auto ph = default_cyst_phantom({-4e-3, 4e-3, 4e-3, 12e-3}, 0.9e-3, 2e6, 2);
    const auto back = parse_phantom(format_phantom(ph));
    ASSERT_EQ(back.scatterers.size(), ph.scatterers.size());
    for (std::size_t k = 0; k < ph.scatterers.size(); ++k) {
        EXPECT_EQ(back.scatterers[k].x, ph.scatterers[k].x);
        EXPECT_EQ(back.scatterers[k].z, ph.scatterers[k].z);
        EXPECT_EQ(back.scatterers[k].amplitude, ph.scatterers[k].amplitude);
    }
    ASSERT_EQ(back.cysts.size(), 9u);
    EXPECT_EQ(back.cysts[4].radius, 0.9e-3);
    EXPECT_EQ(format_phantom(back), format_phantom(ph));
}

TEST(Phantoms, ParseErrorCarriesLine) {
    try {
        parse_phantom("PHANTOM v1 x\n0 1e-3 1\n0 oops 1\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Phantoms, RequiredDurationCoversDeepestEcho) {
    ProbeGeometry probe;
    const auto ph = build_point_phantom({40e-3}, {10e-3});
    const Pulse pulse;
    const double m = 16.0 * std::numbers::pi / 180.0;
    const double d = required_duration(ph, probe, m, pulse);
    for (const auto& a : angle_fan(5, m))
        for (int e : {0, probe.n_elements - 1})
            EXPECT_LT(transmit_delay(10e-3, 40e-3, a, probe.c) + receive_delay(10e-3, 40e-3, probe.element_x(e), probe.c) +
                          pulse.support(),
                      d);
}
