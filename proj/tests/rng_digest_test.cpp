#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "wgmopo/rng.hpp"
#include "wgmopo/sha256.hpp"

using namespace wgmopo;

TEST_CASE("splitmix64 reference sequence") {
    // First outputs for state 0, from the reference implementation by
    // Sebastiano Vigna (https://prng.di.unimi.it/splitmix64.c).
    std::uint64_t state = 0;
    CHECK(splitmix64_next(state) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64_next(state) == 0x6e789e6aa1b965f4ULL);
    CHECK(splitmix64_next(state) == 0x06c45d188009454fULL);
}

TEST_CASE("xoshiro256++ determinism and stream separation") {
    Xoshiro256pp a(42), b(42), c(43);
    bool identical = true, distinct = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next();
        identical &= (va == b.next());
        distinct |= (va != c.next());
    }
    CHECK(identical);
    CHECK(distinct);
}

TEST_CASE("uniform draws live in [0, 1) with the right mean") {
    Xoshiro256pp rng(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // mean 1/2, sigma = 1/sqrt(12 n); allow 5 sigma.
    CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("exponential and gaussian moments") {
    Xoshiro256pp rng(11);
    const int n = 200000;
    double se = 0.0, sg = 0.0, sg2 = 0.0;
    for (int i = 0; i < n; ++i) {
        se += rng.exponential(3.0);
        const double z = rng.gaussian();
        sg += z;
        sg2 += z * z;
    }
    CHECK(std::abs(se / n - 3.0) < 5.0 * 3.0 / std::sqrt(double(n)));
    CHECK(std::abs(sg / n) < 5.0 / std::sqrt(double(n)));
    CHECK(std::abs(sg2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("sha256 reference vectors") {
    // FIPS 180-2 appendix B test vectors.
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}
