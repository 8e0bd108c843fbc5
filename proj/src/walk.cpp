#include "fluctuator/walk.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace fluct::walk {

namespace {

BigInt binomial(int n, int k) {
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

LatticeLaw LatticeLaw::make(const std::map<long, Rational>& atoms) {
  LatticeLaw law;
  Rational total = 0;
  for (const auto& [v, p] : atoms) {
    if (p < 0) throw Error(ErrorKind::NonProbability, "negative mass at " + std::to_string(v));
    if (p == 0) continue;
    law.atoms_[v] = p;
    total += p;
  }
  if (law.atoms_.empty()) throw Error(ErrorKind::EmptySupport, "law has no atoms with positive mass");
  if (total != 1)
    throw Error(ErrorKind::NonProbability, "probabilities sum to " + total.str() + ", not 1");
  for (const auto& [v, p] : law.atoms_) law.float_atoms_.emplace_back(v, to_ld(p));

  // moments to cumulants: k_n = m_n - sum_{k<n} C(n-1, k-1) k_k m_{n-k}
  std::vector<Rational> m(kMaxCumulant + 1);
  for (int k = 0; k <= kMaxCumulant; ++k) m[k] = law.moment(k);
  std::vector<Rational> kappa(kMaxCumulant + 1, Rational(0));
  for (int n = 1; n <= kMaxCumulant; ++n) {
    Rational s = m[n];
    for (int k = 1; k < n; ++k) s -= Rational(binomial(n - 1, k - 1)) * kappa[k] * m[n - k];
    kappa[n] = s;
  }
  law.cumulants_.assign(kappa.begin() + 1, kappa.end());

  long g = 0;
  const long base = law.min_step();
  for (const auto& [v, p] : law.atoms_) g = std::gcd(g, v - base);
  law.span_ = g;
  return law;
}

Rational LatticeLaw::prob(long v) const {
  auto it = atoms_.find(v);
  return it == atoms_.end() ? Rational(0) : it->second;
}

long LatticeLaw::max_abs_step() const { return std::max(std::labs(min_step()), std::labs(max_step())); }

Rational LatticeLaw::moment(int k) const {
  Rational s = 0;
  for (const auto& [v, p] : atoms_) {
    Rational pw = 1;
    for (int i = 0; i < k; ++i) pw *= v;
    s += pw * p;
  }
  return s;
}

Real LatticeLaw::sigma() const { return sqrt(to_real(variance())); }

std::vector<Rational> LatticeLaw::cumulants(int k) const {
  if (k < 1 || k > kMaxCumulant)
    throw Error(ErrorKind::MissingCumulant, "cumulant order " + std::to_string(k) + " outside 1..8");
  return {cumulants_.begin(), cumulants_.begin() + k};
}

WalkTag LatticeLaw::tag() const {
  WalkTag t;
  t.left_continuous = min_step() == -1;
  t.symmetric = true;
  for (const auto& [v, p] : atoms_)
    if (prob(-v) != p) t.symmetric = false;
  return t;
}

LatticeLaw LatticeLaw::reverse() const {
  std::map<long, Rational> r;
  for (const auto& [v, p] : atoms_) r[-v] = p;
  return make(r);
}

void LatticeLaw::require_expansion_ready() const {
  if (mean() != 0) throw Error(ErrorKind::InvalidArgument, "expansions need mean zero, got " + mean().str());
  if (variance() <= 0) throw Error(ErrorKind::InvalidArgument, "expansions need positive variance");
  if (span_ != 1) throw Error(ErrorKind::SpanNotOne, "lattice span is " + std::to_string(span_));
}

void LatticeLaw::require_left_continuous() const {
  if (!tag().left_continuous) throw Error(ErrorKind::NotLeftContinuous, "smallest step is not -1");
}

LatticeLaw law_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("model is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_object())
    throw Error(ErrorKind::Config, "model needs an \"atoms\" object mapping integer steps to probabilities");
  std::map<long, Rational> atoms;
  bool numeric = false;
  for (const auto& [key, val] : j["atoms"].items()) {
    long v = 0;
    try {
      std::size_t used = 0;
      v = std::stol(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "atom key '" + key + "' is not an integer");
    }
    if (val.is_string()) {
      atoms[v] += parse_rational(val.get<std::string>());
    } else if (val.is_number()) {
      numeric = true;
      atoms[v] += parse_rational(val.dump());  // shortest round-trip decimal
    } else {
      throw Error(ErrorKind::Config, "atom '" + key + "' must be a rational string or a number");
    }
  }
  if (j.contains("tolerance")) {
    if (!j["tolerance"].is_number()) throw Error(ErrorKind::Config, "\"tolerance\" must be a number");
    const Rational tol = parse_rational(j["tolerance"].dump());
    Rational total = 0;
    for (const auto& [v, p] : atoms) {
      if (p < 0) throw Error(ErrorKind::NonProbability, "negative mass at " + std::to_string(v));
      total += p;
    }
    const Rational gap = total > 1 ? Rational(total - 1) : Rational(1 - total);
    if (gap > tol)
      throw Error(ErrorKind::NonProbability,
                  "probabilities sum to " + format17(to_real(total)) + ", outside the tolerance");
    if (total > 0)
      for (auto& [v, p] : atoms) p /= total;
  } else if (numeric) {
    // plain decimals are accepted when they already sum to one exactly
    Rational total = 0;
    for (const auto& [v, p] : atoms) total += p;
    if (total != 1)
      throw Error(ErrorKind::NonProbability, "numeric probabilities sum to " + format17(to_real(total)) +
                                                 "; give exact strings or a \"tolerance\" field");
  }
  return LatticeLaw::make(atoms);
}

LatticeLaw load_law(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return law_from_json_text(ss.str());
}

std::string law_to_json_text(const LatticeLaw& law) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json atoms = nlohmann::ordered_json::object();
  for (const auto& [v, p] : law.atoms()) atoms[std::to_string(v)] = p.str();
  j["atoms"] = atoms;
  return j.dump();
}

LatticeLaw lazy_walk() { return LatticeLaw::make({{-1, Rational(1, 4)}, {0, Rational(1, 2)}, {1, Rational(1, 4)}}); }

LatticeLaw skew_walk() { return LatticeLaw::make({{-1, Rational(1, 2)}, {0, Rational(1, 4)}, {2, Rational(1, 4)}}); }

}  // namespace fluct::walk
