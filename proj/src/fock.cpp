#include "gerbeflow/fock.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace gerbeflow::fock {

namespace {

int popcount(std::uint64_t x) { return std::popcount(x); }

// (-1)^(number of occupied window modes strictly below mode)
int jw_sign(const ModeWindow& w, std::uint64_t occ, int mode) {
  return popcount(occ & (w.bit(mode) - 1)) % 2 ? -1 : 1;
}

std::uint64_t window_mask(const ModeWindow& w) {
  return w.span() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w.span()) - 1;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void subsets_of(const std::vector<int>& pool, std::size_t k, std::size_t start, std::vector<int>& cur,
                std::vector<std::vector<int>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < pool.size(); ++i) {
    cur.push_back(pool[i]);
    subsets_of(pool, k, i + 1, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> subsets_up_to(const std::vector<int>& pool, std::size_t kmax) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  for (std::size_t k = 0; k <= std::min(kmax, pool.size()); ++k) subsets_of(pool, k, 0, cur, out);
  return out;
}

}  // namespace

void ModeWindow::validate() const {
  if (!(lo < 0 && 0 < hi)) throw std::invalid_argument("mode window needs lo < 0 < hi");
  if (span() > 62) throw std::invalid_argument("mode window wider than 62 modes");
}

int charge_of(const ModeWindow& w, std::uint64_t occ) {
  const std::uint64_t sea = w.sea();
  int particles = popcount(occ & ~sea & window_mask(w));
  int holes = popcount(~occ & sea);
  return particles - holes;
}

int excitation_level(const ModeWindow& w, std::uint64_t occ) {
  const std::uint64_t sea = w.sea();
  return std::max(popcount(occ & ~sea & window_mask(w)), popcount(~occ & sea));
}

std::vector<int> occupied_modes(const ModeWindow& w, std::uint64_t occ) {
  std::vector<int> out;
  for (int m = w.lo; m < w.hi; ++m)
    if (occ & w.bit(m)) out.push_back(m);
  return out;
}

bool has_guard_margin(const ModeWindow& w, std::uint64_t occ, int g) {
  if (2 * g > w.span()) return false;
  for (int k = 0; k < g; ++k) {
    if (!(occ & w.bit(w.lo + k))) return false;
    if (occ & w.bit(w.hi - 1 - k)) return false;
  }
  return true;
}

std::vector<std::pair<std::uint64_t, int>> loop_action(const ModeWindow& w, int n, std::uint64_t occ) {
  std::vector<std::pair<std::uint64_t, int>> out;
  if (n == 0) {
    int q = charge_of(w, occ);
    if (q != 0) out.emplace_back(occ, q);
    return out;
  }
  for (int i = w.lo; i < w.hi; ++i) {
    const int j = i + n;
    if (!w.contains(j)) continue;
    if (!(occ & w.bit(i)) || (occ & w.bit(j))) continue;
    const std::uint64_t mid = occ & ~w.bit(i);
    const int sign = jw_sign(w, occ, i) * jw_sign(w, mid, j);
    out.emplace_back(mid | w.bit(j), sign);
  }
  return out;
}

std::optional<std::uint64_t> shift_up(const ModeWindow& w, std::uint64_t occ) {
  if (occ & w.bit(w.hi - 1)) return std::nullopt;
  return ((occ << 1) | 1) & window_mask(w);
}

std::optional<std::uint64_t> shift_down(const ModeWindow&, std::uint64_t occ) {
  if (!(occ & 1)) return std::nullopt;
  return occ >> 1;
}

BasisTooLarge::BasisTooLarge(std::size_t req, std::size_t c)
    : std::runtime_error("Fock basis needs " + std::to_string(req) + " states, cap is " + std::to_string(c)),
      required(req),
      cap(c) {}

FockBasis::FockBasis(ModeWindow w, std::optional<int> max_excitation, std::vector<FockBasisState> states)
    : w_(w), max_exc_(max_excitation), states_(std::move(states)) {
  auto m = std::make_shared<Manifest>();
  for (std::size_t i = 0; i < states_.size(); ++i) {
    index_.emplace(states_[i].occupied, i);
    m->labels.push_back(label(i));
    m->grading.push_back(static_cast<std::uint8_t>(((states_[i].charge % 2) + 2) % 2));
  }
  manifest_ = std::move(m);
}

std::optional<std::size_t> FockBasis::index_of(std::uint64_t occ) const {
  auto it = index_.find(occ);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Mask FockBasis::guard_mask(int margin) const {
  Mask m(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) m[i] = has_guard_margin(w_, states_[i].occupied, margin);
  return m;
}

std::string FockBasis::label(std::size_t i) const {
  const std::uint64_t occ = states_.at(i).occupied;
  std::vector<int> particles, holes;
  for (int m = w_.lo; m < w_.hi; ++m) {
    const bool on = occ & w_.bit(m);
    if (m >= 0 && on) particles.push_back(m);
    if (m < 0 && !on) holes.push_back(m);
  }
  if (particles.empty() && holes.empty()) return "vac";
  std::ostringstream os;
  auto list = [&os](const std::vector<int>& v) {
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  };
  os << "p:";
  list(particles);
  os << ";h:";
  list(holes);
  return os.str();
}

FockBasis enumerate_basis(const ModeWindow& w, std::optional<int> max_excitation, std::size_t cap) {
  w.validate();
  if (max_excitation && *max_excitation < 0) throw std::invalid_argument("negative excitation bound");
  const std::size_t P = static_cast<std::size_t>(w.hi), H = static_cast<std::size_t>(-w.lo);
  const std::size_t kmax = max_excitation ? static_cast<std::size_t>(*max_excitation) : std::max(P, H);

  std::size_t required = 0;
  std::size_t np = 0, nh = 0;
  for (std::size_t k = 0; k <= std::min(kmax, P); ++k) np += binomial(P, k);
  for (std::size_t k = 0; k <= std::min(kmax, H); ++k) nh += binomial(H, k);
  required = np * nh;
  if (required > cap) throw BasisTooLarge(required, cap);

  std::vector<int> pmodes, hmodes;
  for (int m = 0; m < w.hi; ++m) pmodes.push_back(m);
  for (int m = w.lo; m < 0; ++m) hmodes.push_back(m);
  const auto psets = subsets_up_to(pmodes, kmax);
  const auto hsets = subsets_up_to(hmodes, kmax);

  struct Keyed {
    int charge;
    std::vector<int> modes;
    std::uint64_t occ;
  };
  std::vector<Keyed> all;
  all.reserve(required);
  for (const auto& ps : psets)
    for (const auto& hs : hsets) {
      std::uint64_t occ = w.sea();
      for (int m : ps) occ |= w.bit(m);
      for (int m : hs) occ &= ~w.bit(m);
      all.push_back({static_cast<int>(ps.size()) - static_cast<int>(hs.size()), occupied_modes(w, occ), occ});
    }
  std::sort(all.begin(), all.end(), [](const Keyed& a, const Keyed& b) {
    if (a.charge != b.charge) return a.charge < b.charge;
    return a.modes < b.modes;
  });
  std::vector<FockBasisState> states;
  states.reserve(all.size());
  for (const auto& k : all) states.push_back({k.occ, k.charge});
  return FockBasis(w, max_excitation, std::move(states));
}

namespace {

void require_mode(const ModeWindow& w, int mode) {
  if (!w.contains(mode))
    throw std::out_of_range("mode " + std::to_string(mode) + " outside window [" + std::to_string(w.lo) + ", " +
                            std::to_string(w.hi) + ")");
}

SparseOperator blank(const FockBasis& b) {
  SparseOperator op(b.size(), b.size());
  op.set_manifest(b.manifest());
  return op;
}

}  // namespace

SparseOperator creation(const FockBasis& b, int mode) {
  const ModeWindow& w = b.window();
  require_mode(w, mode);
  SparseOperator op = blank(b);
  for (std::size_t c = 0; c < b.size(); ++c) {
    const std::uint64_t occ = b[c].occupied;
    if (occ & w.bit(mode)) continue;
    if (auto r = b.index_of(occ | w.bit(mode))) op.add(*r, c, jw_sign(w, occ, mode));
  }
  return op;
}

SparseOperator annihilation(const FockBasis& b, int mode) {
  const ModeWindow& w = b.window();
  require_mode(w, mode);
  SparseOperator op = blank(b);
  for (std::size_t c = 0; c < b.size(); ++c) {
    const std::uint64_t occ = b[c].occupied;
    if (!(occ & w.bit(mode))) continue;
    if (auto r = b.index_of(occ & ~w.bit(mode))) op.add(*r, c, jw_sign(w, occ, mode));
  }
  return op;
}

SparseOperator charge_operator(const FockBasis& b) {
  SparseOperator op = blank(b);
  for (std::size_t c = 0; c < b.size(); ++c) op.add(c, c, b[c].charge);
  return op;
}

SparseOperator loop_operator(const FockBasis& b, int n) {
  const ModeWindow& w = b.window();
  if (n <= -w.span() || n >= w.span()) throw std::invalid_argument("loop index exceeds window span");
  SparseOperator op = blank(b);
  for (std::size_t c = 0; c < b.size(); ++c)
    for (const auto& [img, sign] : loop_action(w, n, b[c].occupied))
      if (auto r = b.index_of(img)) op.add(*r, c, sign);
  return op;
}

namespace {

template <class F>
PartialOperator partial_map(const FockBasis& b, F f) {
  PartialOperator out{blank(b), Mask(b.size())};
  for (std::size_t c = 0; c < b.size(); ++c) {
    auto img = f(b.window(), b[c].occupied);
    if (!img) continue;
    if (auto r = b.index_of(*img)) {
      out.op.add(*r, c, 1);
      out.safe[c] = true;
    }
  }
  return out;
}

}  // namespace

PartialOperator shift_operator(const FockBasis& b) { return partial_map(b, shift_up); }
PartialOperator shift_inverse(const FockBasis& b) { return partial_map(b, shift_down); }

SpinorBasis::SpinorBasis(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 0 || cutoff > 20) throw std::invalid_argument("spinor cutoff must lie in [0, 20]");
  const std::uint32_t total = std::uint32_t{1} << cutoff;
  std::vector<std::uint32_t> sets(total);
  for (std::uint32_t s = 0; s < total; ++s) sets[s] = s;
  auto members = [](std::uint32_t s) {
    std::vector<int> v;
    for (int n = 1; s; ++n, s >>= 1)
      if (s & 1) v.push_back(n);
    return v;
  };
  std::sort(sets.begin(), sets.end(), [&](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return members(a) < members(b);
  });
  auto m = std::make_shared<Manifest>();
  for (std::uint32_t s : sets) {
    index_.emplace(s, states_.size());
    states_.push_back({s, std::popcount(s) % 2});
    m->labels.push_back(label(states_.size() - 1));
    m->grading.push_back(static_cast<std::uint8_t>(states_.back().parity));
  }
  manifest_ = std::move(m);
}

std::string SpinorBasis::label(std::size_t i) const {
  std::uint32_t s = states_.at(i).excitations;
  if (!s) return "eta";
  std::string out;
  for (int n = 1; s; ++n, s >>= 1)
    if (s & 1) out += "psi" + std::to_string(n);
  return out;
}

SparseOperator clifford_operator(const SpinorBasis& s, int n) {
  if (n < -s.cutoff() || n > s.cutoff()) throw std::out_of_range("Clifford index beyond cutoff");
  SparseOperator op(s.size(), s.size());
  op.set_manifest(s.manifest());
  const int m = n < 0 ? -n : n;
  for (std::size_t c = 0; c < s.size(); ++c) {
    const std::uint32_t set = s[c].excitations;
    if (n == 0) {
      op.add(c, c, s[c].parity ? -1 : 1);
      continue;
    }
    const std::uint32_t b = std::uint32_t{1} << (m - 1);
    const int sign = std::popcount(set & (b - 1)) % 2 ? -1 : 1;
    if (n > 0 && !(set & b)) op.add(s.index_of(set | b), c, GaussRational(Rational(sign), Rational(sign)));
    if (n < 0 && (set & b)) op.add(s.index_of(set & ~b), c, GaussRational(Rational(sign), Rational(-sign)));
  }
  return op;
}

std::optional<int> operator_parity(const SparseOperator& op) {
  auto m = op.manifest();
  if (!m) return std::nullopt;
  std::optional<int> parity;
  for (std::size_t c = 0; c < op.cols(); ++c)
    for (const auto& [r, v] : op.column(c)) {
      const int p = m->grading[r] ^ m->grading[c];
      if (parity && *parity != p) return std::nullopt;
      parity = p;
    }
  return parity.value_or(0);
}

SparseOperator tensor(const SparseOperator& a, const SparseOperator& b, std::size_t cap) {
  const std::size_t rows = a.rows() * b.rows(), cols = a.cols() * b.cols();
  if ((a.rows() && rows / a.rows() != b.rows()) || rows > cap || cols > cap)
    throw std::length_error("tensor product dimension exceeds cap");
  auto ma = a.manifest();
  int b_parity = 0;
  if (b.manifest()) {
    auto p = operator_parity(b);
    if (!p) throw std::invalid_argument("graded tensor needs a homogeneous right factor");
    b_parity = *p;
  }
  SparseOperator out(rows, cols);
  for (std::size_t ca = 0; ca < a.cols(); ++ca) {
    const bool flip = b_parity && ma && ma->grading[ca];
    for (std::size_t cb = 0; cb < b.cols(); ++cb)
      for (const auto& [ra, va] : a.column(ca))
        for (const auto& [rb, vb] : b.column(cb)) {
          GaussRational v = va * vb;
          out.add(ra * b.rows() + rb, ca * b.cols() + cb, flip ? -v : v);
        }
  }
  auto mb = b.manifest();
  if (ma && mb && rows == cols) {
    auto m = std::make_shared<Manifest>();
    for (std::size_t i = 0; i < ma->labels.size(); ++i)
      for (std::size_t j = 0; j < mb->labels.size(); ++j) {
        m->labels.push_back(ma->labels[i] + "|" + mb->labels[j]);
        m->grading.push_back(ma->grading[i] ^ mb->grading[j]);
      }
    out.set_manifest(std::move(m));
  }
  return out;
}

}  // namespace gerbeflow::fock
