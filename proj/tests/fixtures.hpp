#pragma once

#include <string>

#include "checkseg/bankid.hpp"
#include "checkseg/pipeline.hpp"
#include "checkseg/registry.hpp"
#include "checkseg/synthgen.hpp"

namespace fixture {

struct Check {
    checkseg::GeneratedCheck blank;
    checkseg::GeneratedCheck filled;
    checkseg::Raster scanned_blank;
    const checkseg::BankRecord* bank = nullptr;
};

inline checkseg::GenSpec spec(const std::string& code, std::uint64_t seed, double skew = 0.0, double sigma = 2.5) {
    checkseg::GenSpec s;
    s.bank_code = code;
    s.seed = seed;
    s.skew_deg = skew;
    s.noise.sigma = sigma;
    return s;
}

inline Check make(const checkseg::GenSpec& s) {
    Check c;
    c.bank = checkseg::default_registry().find_code(s.bank_code);
    c.blank = checkseg::generate_template(*c.bank, s);
    c.filled = checkseg::fill_check(c.blank, *c.bank, s);
    c.scanned_blank = checkseg::scan_template(c.blank, s);
    return c;
}

inline Check make(const std::string& code, std::uint64_t seed, double skew = 0.0, double sigma = 2.5) {
    return make(spec(code, seed, skew, sigma));
}

}  // namespace fixture
