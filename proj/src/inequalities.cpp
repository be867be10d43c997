#include "ivdep/inequalities.hpp"

#include <algorithm>
#include <cctype>

#include "ivdep/error.hpp"

namespace ivdep {

namespace {

struct Term {
  int a, b, x;
  long coeff;
};

InequalitySpec make(std::string id, int x_card, long constant, bool ace_term, std::initializer_list<Term> terms) {
  InequalitySpec spec;
  spec.id = std::move(id);
  spec.x_card = x_card;
  spec.constant = constant;
  spec.ace_term = ace_term;
  spec.obs_coeffs.assign(static_cast<std::size_t>(4 * x_card), 0);
  for (const Term& t : terms) spec.obs_coeffs[cell_index(t.a, t.b, t.x)] += t.coeff;
  return spec;
}

std::optional<InequalitySpec> base_inequality(std::string_view id) {
  if (id.size() == 8 && id.substr(0, 6) == "pearl-") {
    const char j = id[6];
    const char s = id[7];
    if ((j != '0' && j != '1') || (s != '0' && s != '1')) return std::nullopt;
    const int a = j - '0';
    const int x0 = s - '0';
    // p(j,0|x0) + p(j,1|1−x0) ≤ 1
    return make(std::string(id), 2, 1, false, {{a, 0, x0, -1}, {a, 1, 1 - x0, -1}});
  }
  if (id == "bonet") {
    return make("bonet", 3, 0, false, {{0, 1, 0, -1}, {0, 1, 1, 1}, {1, 1, 1, 1}, {1, 0, 2, 1}, {0, 1, 2, 1}});
  }
  if (id == "kedagni") {
    return make("kedagni", 4, 0, false,
                {{0, 0, 0, -1}, {1, 0, 0, -1}, {0, 1, 1, 1}, {1, 0, 1, 1},
                 {0, 0, 2, 1}, {1, 0, 2, 1}, {0, 0, 3, 1}, {1, 1, 3, 1}});
  }
  if (id == "c1") {
    return make("c1", 2, 2, true, {{0, 0, 0, -2}, {1, 1, 0, -1}, {0, 1, 1, -1}, {1, 1, 1, -1}});
  }
  if (id == "c2") {
    return make("c2", 3, 2, true, {{0, 0, 0, -1}, {0, 0, 2, -1}, {1, 0, 0, -1}, {1, 1, 1, -1}, {1, 1, 2, -1}});
  }
  if (id == "c3") {
    return make("c3", 3, 2, true,
                {{0, 0, 0, -1}, {0, 0, 1, -1}, {0, 1, 1, 1}, {0, 1, 2, -1},
                 {1, 0, 0, -1}, {1, 0, 1, 1}, {1, 1, 1, -1}, {1, 1, 2, -1}});
  }
  return std::nullopt;
}

Relabeling parse_suffix(std::string_view rest, int x_card, std::string_view full_id) {
  Relabeling r = Relabeling::identity(x_card);
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::invalid_argument, "bad relabeling in '" + std::string(full_id) + "': " + why);
  };
  while (!rest.empty()) {
    if (rest.front() != '/') throw bad("expected '/'");
    rest.remove_prefix(1);
    const std::size_t end = std::min(rest.find('/'), rest.size());
    const std::string_view part = rest.substr(0, end);
    rest.remove_prefix(end);
    if (part.empty()) throw bad("empty component");
    if (part.front() == 'x') {
      const std::string_view digits = part.substr(1);
      if (digits.size() != static_cast<std::size_t>(x_card)) throw bad("x permutation needs " + std::to_string(x_card) + " digits");
      std::vector<int> perm;
      for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c)) || c - '0' >= x_card) throw bad("x permutation digit out of range");
        perm.push_back(c - '0');
      }
      std::vector<int> sorted = perm;
      std::sort(sorted.begin(), sorted.end());
      for (int i = 0; i < x_card; ++i) {
        if (sorted[static_cast<std::size_t>(i)] != i) throw bad("x permutation is not a permutation");
      }
      r.x_perm = perm;
    } else if (part == "a") {
      r.a_flip = 1;
    } else if (part.front() == 'b' && part.size() == 3 && (part[1] == '0' || part[1] == '1') &&
               (part[2] == '0' || part[2] == '1')) {
      r.b_flip = {part[1] - '0', part[2] - '0'};
    } else {
      throw bad("unknown component '" + std::string(part) + "'");
    }
  }
  return r;
}

}  // namespace

bool InequalitySpec::has_do() const {
  return ace_term || std::any_of(do_coeffs.begin(), do_coeffs.end(), [](long c) { return c != 0; });
}

Relabeling Relabeling::identity(int x_card) {
  Relabeling r;
  for (int x = 0; x < x_card; ++x) r.x_perm.push_back(x);
  return r;
}

bool Relabeling::is_identity() const {
  for (std::size_t x = 0; x < x_perm.size(); ++x) {
    if (x_perm[x] != static_cast<int>(x)) return false;
  }
  return a_flip == 0 && b_flip[0] == 0 && b_flip[1] == 0;
}

std::string Relabeling::suffix() const {
  std::string out;
  bool moved = false;
  for (std::size_t x = 0; x < x_perm.size(); ++x) moved = moved || x_perm[x] != static_cast<int>(x);
  if (moved) {
    out += "/x";
    for (int v : x_perm) out += static_cast<char>('0' + v);
  }
  if (a_flip) out += "/a";
  if (b_flip[0] || b_flip[1]) {
    out += "/b";
    out += static_cast<char>('0' + b_flip[0]);
    out += static_cast<char>('0' + b_flip[1]);
  }
  return out;
}

InequalitySpec inequality_by_id(std::string_view id) {
  const std::size_t slash = std::min(id.find('/'), id.size());
  const std::string_view base_id = id.substr(0, slash);
  auto base = base_inequality(base_id);
  if (!base) throw Error(ErrorCode::invalid_argument, "unknown inequality id '" + std::string(id) + "'");
  const Relabeling r = parse_suffix(id.substr(slash), base->x_card, id);
  if (r.is_identity()) return *base;
  return relabel(*base, r);
}

std::vector<std::string> catalog_ids() {
  return {"pearl-00", "pearl-01", "pearl-10", "pearl-11", "c1", "bonet", "c2", "c3", "kedagni"};
}

std::vector<InequalitySpec> catalog(const Scenario& scenario) {
  std::vector<std::string> ids;
  switch (scenario.x_card) {
    case 2:
      // c1 and the relabelings that keep the sign of p(0|do0) − p(0|do1).
      ids = {"pearl-00", "pearl-01", "pearl-10", "pearl-11", "c1", "c1/x10", "c1/a/b11", "c1/x10/a/b11"};
      break;
    case 3: ids = {"bonet", "c2", "c3"}; break;
    case 4: ids = {"kedagni"}; break;
    default: break;
  }
  std::vector<InequalitySpec> out;
  for (const auto& id : ids) out.push_back(inequality_by_id(id));
  return out;
}

InequalitySpec relabel(const InequalitySpec& spec, const Relabeling& r) {
  if (r.x_perm.size() != static_cast<std::size_t>(spec.x_card)) {
    throw Error(ErrorCode::dimension_mismatch, "relabeling cardinality does not match inequality");
  }
  if (spec.ace_term && r.b_flip[0] != r.b_flip[1]) {
    throw Error(ErrorCode::unsupported, "outcome flips depending on the treatment change ACE; use b00 or b11");
  }
  InequalitySpec out = spec;
  out.id = spec.id + r.suffix();
  std::fill(out.obs_coeffs.begin(), out.obs_coeffs.end(), 0);
  out.do_coeffs = {};
  for (int x = 0; x < spec.x_card; ++x) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const int na = a ^ r.a_flip;
        const int nb = b ^ r.b_flip[static_cast<std::size_t>(a)];
        out.obs_coeffs[cell_index(na, nb, r.x_perm[static_cast<std::size_t>(x)])] = spec.obs(a, b, x);
        if (x == 0) out.do_coeffs[static_cast<std::size_t>(na * 2 + nb)] = spec.do_coeffs[static_cast<std::size_t>(a * 2 + b)];
      }
    }
  }
  return out;
}

template <class T>
ObservedDistribution<T> relabel(const ObservedDistribution<T>& dist, const Relabeling& r) {
  if (r.x_perm.size() != static_cast<std::size_t>(dist.scenario.x_card)) {
    throw Error(ErrorCode::dimension_mismatch, "relabeling cardinality does not match distribution");
  }
  ObservedDistribution<T> out = dist;
  for (int x = 0; x < dist.scenario.x_card; ++x) {
    const int nx = r.x_perm[static_cast<std::size_t>(x)];
    out.p_x[static_cast<std::size_t>(nx)] = dist.p_x[static_cast<std::size_t>(x)];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        out.p(a ^ r.a_flip, b ^ r.b_flip[static_cast<std::size_t>(a)], nx) = dist.p(a, b, x);
      }
    }
  }
  return out;
}

template <class T>
InterventionalDistribution<T> relabel(const InterventionalDistribution<T>& dist, const Relabeling& r) {
  InterventionalDistribution<T> out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) out.p(b ^ r.b_flip[static_cast<std::size_t>(a)], a ^ r.a_flip) = dist.p(b, a);
  }
  return out;
}

template <class T>
T ace(const InterventionalDistribution<T>& dist) {
  return Num<T>::abs(T(dist.p(0, 0) - dist.p(0, 1)));
}

template <class T>
ViolationReport<T> evaluate(const InequalitySpec& spec, const ObservedDistribution<T>& dist,
                            const std::optional<InterventionalDistribution<T>>& do_dist) {
  if (dist.scenario.x_card != spec.x_card) {
    throw Error(ErrorCode::dimension_mismatch, spec.id + " needs x_card " + std::to_string(spec.x_card) + ", got " +
                                                   std::to_string(dist.scenario.x_card));
  }
  if (spec.has_do() && !do_dist) {
    throw Error(ErrorCode::invalid_argument, spec.id + " involves p(b|do(a)); an interventional distribution is required");
  }
  T k(spec.constant);
  for (std::size_t i = 0; i < spec.obs_coeffs.size(); ++i) {
    if (spec.obs_coeffs[i] != 0) k += T(spec.obs_coeffs[i]) * dist.table[i];
  }
  if (do_dist) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const long c = spec.do_coeffs[static_cast<std::size_t>(a * 2 + b)];
        if (c != 0) k += T(c) * do_dist->p(b, a);
      }
    }
    if (spec.ace_term) k += ace(*do_dist);
  }
  ViolationReport<T> report;
  report.k_value = k;
  report.violated = k < T(0);
  report.alpha = report.violated ? T(-k) : T(0);
  return report;
}

std::string_view to_string(AceBranch branch) {
  switch (branch) {
    case AceBranch::nonneg: return "nonneg";
    case AceBranch::nonpos: return "nonpos";
    case AceBranch::combined: return "combined";
  }
  return "unknown";
}

LinearSystem linearize(const InequalitySpec& spec, AceBranch branch) {
  LinearForm base;
  base.obs = spec.obs_coeffs;
  base.dos = spec.do_coeffs;
  base.constant = spec.constant;
  LinearSystem sys;
  if (!spec.ace_term) {
    sys.alpha_rows.push_back(base);
    return sys;
  }
  // D = p(0|do0) − p(0|do1)
  auto with_d = [&](long sign) {
    LinearForm f = base;
    f.dos[0] += sign;
    f.dos[2] -= sign;
    return f;
  };
  auto sign_row = [&](long sign) {
    LinearForm f;
    f.obs.assign(spec.obs_coeffs.size(), 0);
    f.dos[0] = -sign;
    f.dos[2] = sign;
    return f;
  };
  switch (branch) {
    case AceBranch::nonneg:
      sys.alpha_rows.push_back(with_d(1));
      sys.sign_rows.push_back(sign_row(1));
      break;
    case AceBranch::nonpos:
      sys.alpha_rows.push_back(with_d(-1));
      sys.sign_rows.push_back(sign_row(-1));
      break;
    case AceBranch::combined:
      sys.alpha_rows.push_back(with_d(1));
      sys.alpha_rows.push_back(with_d(-1));
      break;
  }
  return sys;
}

std::vector<AceBranch> branches(const InequalitySpec& spec) {
  if (spec.ace_term) return {AceBranch::nonneg, AceBranch::nonpos};
  return {AceBranch::nonneg};
}

#define IVDEP_INSTANTIATE_INEQ(T)                                                                          \
  template ObservedDistribution<T> relabel(const ObservedDistribution<T>&, const Relabeling&);            \
  template InterventionalDistribution<T> relabel(const InterventionalDistribution<T>&, const Relabeling&); \
  template T ace(const InterventionalDistribution<T>&);                                                   \
  template ViolationReport<T> evaluate(const InequalitySpec&, const ObservedDistribution<T>&,             \
                                       const std::optional<InterventionalDistribution<T>>&);

IVDEP_INSTANTIATE_INEQ(double)
IVDEP_INSTANTIATE_INEQ(Rational)

}  // namespace ivdep
