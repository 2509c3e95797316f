// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "common/math.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"

using namespace sonotrace;

TEST_SUITE("common") {
  TEST_CASE("quaternion rotation matches axis-angle geometry") {
    const Quat q = Quat::from_axis_angle({0.0, 0.0, 1.0}, std::numbers::pi / 2.0);
    const Vec3 r = q.rotate({1.0, 0.0, 0.0});
    CHECK(r.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.y == doctest::Approx(1.0));
    CHECK(std::abs(r.z) < 1e-15);
    const Vec3 back = q.conjugate().rotate(r);
    CHECK(std::abs(back.x - 1.0) < 1e-15);
  }

  TEST_CASE("pose apply and apply_inverse round trip") {
    Pose p;
    p.position = {1.5, -2.0, 0.25};
    p.orientation = Quat::from_axis_angle({1.0, 2.0, 3.0}, 0.7);
    CHECK(p.valid());
    const Vec3 v{0.3, 0.4, -5.0};
    const Vec3 w = p.apply_inverse(p.apply(v));
    CHECK(norm(w - v) < 1e-12);
    Pose bad = p;
    bad.orientation.w *= 1.01;
    CHECK_FALSE(bad.valid());
  }

  TEST_CASE("angle_between is accurate near 0 and pi") {
    CHECK(angle_between({1, 0, 0}, {1, 0, 0}) == 0.0);
    CHECK(angle_between({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(std::numbers::pi));
    CHECK(angle_between({1, 0, 0}, {1, 1e-9, 0}) == doctest::Approx(1e-9).epsilon(1e-6));
  }

  TEST_CASE("derived seeds are distinct across streams and reproducible") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 16; ++a) {
      for (std::uint64_t b = 0; b < 16; ++b) seen.insert(derive_seed(7, a, b));
    }
    CHECK(seen.size() == 256);
    Rng x(derive_seed(1, 2, 3));
    Rng y(derive_seed(1, 2, 3));
    for (int i = 0; i < 100; ++i) CHECK(x.uniform() == y.uniform());
  }

  TEST_CASE("uniform draws stay in [0, 1)") {
    Rng rng(42);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double u = rng.uniform();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(lo < 1e-3);
    CHECK(hi > 1.0 - 1e-3);
  }

  TEST_CASE("byte writer and reader are little-endian and bounds-checked") {
    ByteWriter w;
    w.u16(0x0102);
    w.u32(0x03040506);
    w.f64(-1.5);
    const auto bytes = std::move(w).take();
    REQUIRE(bytes.size() == 14);
    CHECK(bytes[0] == 0x02);
    CHECK(bytes[1] == 0x01);
    CHECK(bytes[2] == 0x06);
    ByteReader r(bytes);
    CHECK(r.u16() == 0x0102);
    CHECK(r.u32() == 0x03040506);
    CHECK(r.f64() == -1.5);
    CHECK(r.remaining() == 0);
    try {
      r.u8();
      FAIL("expected overrun");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
    }
  }

  TEST_CASE("parallel_for visits every index once and rethrows") {
    for (unsigned workers : {1u, 2u, 7u}) {
      std::vector<std::atomic<int>> hits(1000);
      parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
      bool all_once = true;
      for (auto& h : hits) all_once = all_once && h.load() == 1;
      CHECK(all_once);
    }
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                   if (i == 5) fail(ErrorCode::DomainError, "boom");
                                 }),
                    Error);
    CHECK(default_worker_count() >= 1);
  }

  TEST_CASE("error codes have stable names") {
    CHECK(std::string(error_code_name(ErrorCode::ParseError)) == "ParseError");
    CHECK(std::string(error_code_name(ErrorCode::AliasRisk)) == "AliasRisk");
    CHECK(static_cast<int>(ErrorCode::ProtocolError) == 16);
  }

  TEST_CASE("warnings go to the installed handler") {
    std::vector<std::string> got;
    set_warning_handler([&](std::string_view m) { got.emplace_back(m); });
    warn("hello");
    set_warning_handler([](std::string_view) {});
    REQUIRE(got.size() == 1);
    CHECK(got[0] == "hello");
  }
}
