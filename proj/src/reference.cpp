#include "exlat/reference.hpp"

#include <array>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "exlat/return_prob.hpp"

namespace exlat::reference {
namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

int slot(const LatticeSpec& spec) {
  if (spec.family() != Family::E)
    throw std::invalid_argument("no reference values for " + spec.name());
  return spec.rank() - 6;
}

Real pi() { return boost::math::constants::pi<Real>(); }

}  // namespace

const std::vector<LatticeSpec>& exceptional() {
  static const std::vector<LatticeSpec> specs{{Family::E, 6}, {Family::E, 7}, {Family::E, 8}};
  return specs;
}

const std::vector<SingularityRow>& singularities(const LatticeSpec& spec) {
  static const std::vector<SingularityRow> rows[3] = {
      {{{-72, 1}, 0, 6, 0}, {{-8, 1}, 1, 5, 0}, {{0, 1}, 2, 4, 0}, {{8, 1}, 1, 0, 5},
       {{9, 1}, 6, 0, 0}},
      {{{-126, 1}, 0, 7, 0}, {{-18, 1}, 1, 6, 0}, {{2, 1}, 1, 6, 0}, {{18, 5}, 2, 5, 0},
       {{6, 1}, 3, 4, 0}, {{9, 1}, 2, 0, 5}, {{10, 1}, 6, 1, 0}, {{14, 1}, 7, 0, 0}},
      {{{-240, 1}, 0, 8, 0}, {{-16, 1}, 1, 7, 0}, {{3, 1}, 2, 6, 0}, {{8, 1}, 3, 5, 0},
       {{10, 1}, 4, 4, 0}, {{11, 1}, 5, 3, 0}, {{185, 16}, 6, 2, 0}, {{320, 27}, 7, 1, 0},
       {{12, 1}, 7, 1, 0}, {{12, 1}, 8, 0, 0}, {{16, 1}, 8, 0, 0}},
  };
  return rows[slot(spec)];
}

const ExtremaRow& extrema(const LatticeSpec& spec) {
  static const std::array<ExtremaRow, 3> rows = [] {
    const Real sqrt3 = boost::multiprecision::sqrt(Real(3));
    const Real p3 = pow(pi(), 3);
    const Real p4 = pow(pi(), 4);
    ExtremaRow e6{8, {9, 1}, 80, 0, 0, 0.022901, 0.022916};
    e6.tail_min = static_cast<double>(1 / (Real(8192) * 9 * sqrt3 * p3));
    e6.tail_max = static_cast<double>(5 / (9 * sqrt3 * p3));
    ExtremaRow e7{9, {14, 1}, 36, 0, 0, 0.011973, 0.011982};
    e7.tail_min = static_cast<double>(1 / (Real(128) * 6561 * 5 * p4));
    e7.tail_max = static_cast<double>(3 / (160 * p4));
    ExtremaRow e8{15, {16, 1}, 135, 0, 0, 0.0059014, 0.0059064};
    e8.tail_min = static_cast<double>(1 / (Real(8192) * 243 * 625 * p4));
    e8.tail_max = static_cast<double>(45 / (8192 * p4));
    return std::array<ExtremaRow, 3>{e6, e7, e8};
  }();
  return rows[slot(spec)];
}

std::vector<BigInt> walk_counts(const LatticeSpec& spec) {
  static const char* const rows[3][9] = {
      {"1", "0", "72", "1440", "54216", "2134080", "93993120", "4423628160", "219463602120"},
      {"1", "0", "126", "4032", "228690", "14394240", "1020623940", "78353170560",
       "6393827197170"},
      {"1", "0", "240", "13440", "1260720", "137813760", "17141798400", "2336327078400",
       "341350907713200"},
  };
  std::vector<BigInt> out;
  for (const char* s : rows[slot(spec)]) out.emplace_back(s);
  return out;
}

double watson_a3() { return exlat::watson_a3(); }

std::vector<double> marker_energies(const LatticeSpec& spec) {
  std::vector<double> out;
  for (const auto& row : singularities(spec)) {
    const double e = row.energy.value();
    if (out.empty() || out.back() != e) out.push_back(e);
  }
  return out;
}

}  // namespace exlat::reference
