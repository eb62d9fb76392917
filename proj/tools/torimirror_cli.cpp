// Batch front end: JSON input document, one subcommand per verification suite.
#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "torimirror/hypergeom.hpp"
#include "torimirror/mirror_lg.hpp"
#include "torimirror/oscint.hpp"

using namespace tmir;
using json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int g_digits = special::kDefaultDigits;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", std::min(g_digits, 17), x);
  return buf;
}
json cnum(cplx c) { return json{{"re", num(c.real())}, {"im", num(c.imag())}}; }
json rvec(const RatVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_str(x));
  return a;
}
json ivec(const IntVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.get_str());
  return a;
}
json gelem(const lattice::GroupElem& g) { return json{{"free", ivec(g.free)}, {"tors", ivec(g.tors)}}; }

Rat parse_rat(const json& j, const std::string& what) {
  try {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_string()) {
      Rat r(j.get<std::string>());
      r.canonicalize();
      if (r.get_den() == 0) throw InputError(what + ": zero denominator");
      return r;
    }
  } catch (const std::invalid_argument&) {
  }
  throw InputError(what + ": expected an integer or a \"num/den\" string");
}

struct Input {
  stack::StackInitialData data;
  std::optional<IntMatrix> basis;
  bool weak_fano = false;
  std::optional<Rat> cap;
  std::vector<double> q;
  std::optional<double> z;
  std::optional<int> digits;
  std::vector<IntVec> gram_basis;
};

Input read_input(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("top level must be an object");
  if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion)
    throw InputError("schema_version must be " + std::to_string(kSchemaVersion));
  for (const char* k : {"rank_L", "weights", "eta"})
    if (!j.contains(k)) throw InputError(std::string("missing field ") + k);
  Input in;
  if (!j["rank_L"].is_number_integer() || j["rank_L"].get<long>() < 1) throw InputError("rank_L must be a positive integer");
  in.data.r = j["rank_L"].get<std::size_t>();
  const auto& W = j["weights"];
  if (!W.is_array() || W.empty()) throw InputError("weights must be a non-empty array of rows");
  in.data.D = IntMatrix(W.size(), in.data.r);
  for (std::size_t i = 0; i < W.size(); ++i) {
    if (!W[i].is_array() || W[i].size() != in.data.r) throw InputError("weights row " + std::to_string(i + 1) + " has wrong length");
    for (std::size_t c = 0; c < in.data.r; ++c) {
      if (!W[i][c].is_number_integer()) throw InputError("weights must be integers");
      in.data.D(i, c) = Int(W[i][c].get<long>());
    }
  }
  if (!j["eta"].is_array() || j["eta"].size() != in.data.r) throw InputError("eta must have rank_L entries");
  for (const auto& e : j["eta"]) in.data.eta.push_back(parse_rat(e, "eta"));
  if (j.contains("basis_p")) {
    const auto& P = j["basis_p"];
    if (!P.is_array() || P.size() != in.data.r) throw InputError("basis_p must be rank_L x rank_L");
    IntMatrix B(in.data.r, in.data.r);
    for (std::size_t a = 0; a < in.data.r; ++a) {
      if (!P[a].is_array() || P[a].size() != in.data.r) throw InputError("basis_p must be rank_L x rank_L");
      for (std::size_t c = 0; c < in.data.r; ++c) {
        if (!P[a][c].is_number_integer()) throw InputError("basis_p must be integers");
        B(a, c) = Int(P[a][c].get<long>());
      }
    }
    in.basis = B;
  }
  if (j.contains("weak_fano")) {
    if (!j["weak_fano"].is_boolean()) throw InputError("weak_fano must be a boolean");
    in.weak_fano = j["weak_fano"].get<bool>();
  }
  if (j.contains("cap")) in.cap = parse_rat(j["cap"], "cap");
  if (j.contains("digits")) {
    if (!j["digits"].is_number_integer()) throw InputError("digits must be an integer");
    in.digits = j["digits"].get<int>();
  }
  if (j.contains("q")) {
    if (!j["q"].is_array()) throw InputError("q must be an array");
    for (const auto& x : j["q"]) {
      if (x.is_number()) in.q.push_back(x.get<double>());
      else in.q.push_back(parse_rat(x, "q").get_d());
    }
  }
  if (j.contains("z")) {
    if (!j["z"].is_number()) throw InputError("z must be a number");
    in.z = j["z"].get<double>();
  }
  if (j.contains("gram_basis")) {
    for (const auto& row : j["gram_basis"]) {
      IntVec xi;
      for (const auto& x : row) {
        if (!x.is_number_integer()) throw InputError("gram_basis entries must be integers");
        xi.push_back(Int(x.get<long>()));
      }
      if (xi.size() != in.data.r) throw InputError("gram_basis rows must have rank_L entries");
      in.gram_basis.push_back(xi);
    }
  }
  return in;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw InputError("cannot parse number '" + tok + "'");
    }
  }
  return out;
}

struct Context {
  Input in;
  std::unique_ptr<stack::InertiaData> X;
  std::unique_ptr<stack::NefBasis> B;
  std::unique_ptr<cohomology::Cohomology> H;
  std::unique_ptr<chern::Chern> C;
  std::unique_ptr<hypergeom::Hypergeom> G;
};

// checks are collected; the report passes iff every check passes
struct Report {
  json doc;
  json checks = json::array();
  void check(const std::string& name, bool ok, json detail = json::object()) {
    json c{{"name", name}, {"pass", ok}};
    for (auto& [k, v] : detail.items()) c[k] = v;
    checks.push_back(c);
  }
  bool pass() const {
    for (const auto& c : checks)
      if (!c["pass"].get<bool>()) return false;
    return true;
  }
};

json conventions() {
  oscint::Conventions c;
  return json{{"kernel", c.kernel},
              {"rotation", c.rotation},
              {"omega", c.omega},
              {"normalization", c.normalization},
              {"orientation", c.orientation},
              {"h_variable", "x_a = q_a z^{-rho_a}"}};
}

std::string box_csv(const stack::InertiaData& X) {
  std::string s = "index,age,n_v,support,d,v_free,v_tors,inverse\n";
  for (const auto& b : X.box) {
    std::string d, vf, vt;
    for (const auto& x : b.d) d += (d.empty() ? "" : " ") + to_str(x);
    for (const auto& x : b.v.free) vf += (vf.empty() ? "" : " ") + x.get_str();
    for (const auto& x : b.v.tors) vt += (vt.empty() ? "" : " ") + x.get_str();
    s += std::to_string(b.index) + "," + to_str(b.age) + "," + std::to_string(b.n_v) + "," + stack::subset_str(b.support) +
         "," + d + "," + vf + "," + vt + "," + std::to_string(b.inv) + "\n";
  }
  return s;
}

json box_json(const stack::InertiaData& X) {
  json a = json::array();
  for (const auto& b : X.box)
    a.push_back(json{{"index", b.index},
                     {"v", gelem(b.v)},
                     {"d", rvec(b.d)},
                     {"age", to_str(b.age)},
                     {"n_v", b.n_v},
                     {"support", stack::subset_str(b.support)},
                     {"inverse", b.inv}});
  return a;
}

void cmd_validate(Context& c, Report& R) {
  const auto& X = *c.X;
  R.doc["m"] = X.m;
  R.doc["r"] = X.r;
  R.doc["n"] = X.n;
  R.doc["N"] = json{{"free_rank", X.N.free_rank}, {"torsion", ivec(X.N.torsion)}};
  json rays = json::array();
  for (const auto& b : X.b) rays.push_back(gelem(b));
  R.doc["rays"] = rays;
  json anti = json::array();
  for (auto s : X.anticones) anti.push_back(stack::subset_str(s));
  R.doc["anticones"] = anti;
  json mx = json::array();
  for (auto s : X.max_anticones) mx.push_back(stack::subset_str(s));
  R.doc["minimal_anticones"] = mx;
  R.doc["m_prime"] = X.mprime;
  R.doc["box"] = box_json(X);
  auto wf = stack::weak_fano_check(X, *c.B);
  json ages = json::array();
  for (const auto& [j, a] : wf.extra_ages) ages.push_back(json{{"j", j + 1}, {"age", to_str(a)}});
  R.doc["weak_fano"] = json{{"rho_hat_in_closure", wf.rho_hat_in_cl}, {"extra_ray_ages", ages}};
  json P = json::array();
  for (std::size_t a = 0; a < X.r; ++a) P.push_back(ivec(c.B->P.row(a)));
  R.doc["basis_p"] = P;
  R.doc["rho"] = ivec(c.B->rho);
  R.check("validated", true);
  if (c.in.weak_fano) R.check("weak_fano", wf.weak_fano());
}

void cmd_cohomology(Context& c, Report& R) {
  const auto& H = *c.H;
  R.doc["total_dim"] = H.total_dim();
  json secs = json::array();
  for (std::size_t v = 0; v < H.sectors(); ++v)
    secs.push_back(json{{"sector", v}, {"dim", H.ring(v).dim()}, {"age", to_str(c.X->box[v].age)}});
  R.doc["sectors"] = secs;
  json basis = json::array();
  for (std::size_t k = 0; k < H.total_dim(); ++k)
    basis.push_back(json{{"label", H.label(k)}, {"hdeg", H.hdeg(k)}, {"orbdeg_half", to_str(H.orbdeg_half(k))}});
  R.doc["basis"] = basis;
  auto M = H.pairing_matrix();
  json pm = json::array();
  for (std::size_t i = 0; i < M.rows; ++i) pm.push_back(rvec(M.row(i)));
  R.doc["pairing_matrix"] = pm;
  RatMatrix A = M;
  R.check("pairing_nondegenerate", lattice::rank(A) == M.rows);
}

void cmd_gamma(Context& c, Report& R, std::size_t order, double tol) {
  const auto& H = *c.H;
  json g = json::object(), t = json::object();
  const auto& gc = c.C->gamma_class();
  const auto& tc = c.C->todd_class();
  for (std::size_t k = 0; k < H.total_dim(); ++k) {
    g[H.label(k)] = cnum(gc[k]);
    t[H.label(k)] = cnum(tc[k]);
  }
  R.doc["gamma_hat"] = g;
  R.doc["todd"] = t;
  json per = json::array();
  double worst = 0;
  for (std::size_t v = 0; v < H.sectors(); ++v) {
    double e = c.C->gamma_todd_identity_check(v, order);
    worst = std::max(worst, e);
    per.push_back(json{{"sector", v}, {"max_coeff_error", num(e)}});
  }
  R.doc["gamma_todd_identity"] = per;
  R.check("gamma_todd_identity", worst < tol, json{{"order", order}, {"max_error", num(worst)}, {"tol", num(tol)}});
}

void cmd_chi(Context& c, Report& R, long order) {
  json rows = json::array();
  bool ok = true;
  for (std::size_t a = 0; a < c.X->r; ++a)
    for (long k = -order; k <= order; ++k) {
      IntVec xp(c.X->r, Int(0));
      xp[a] = k;
      IntVec xi = c.B->from_p_coords(xp);
      json row{{"xi", ivec(xi)}, {"p_coords", ivec(xp)}};
      try {
        auto res = c.C->chi(chern::KClass::line(xi));
        row["chi"] = res.integer.get_str();
        row["exact"] = res.exact;
        row["value"] = cnum(res.value);
      } catch (const Error& e) {
        ok = false;
        row["error"] = e.what();
      }
      rows.push_back(row);
    }
  R.doc["chi"] = rows;
  R.check("integrality", ok);
}

// greedy: accept xi if the framings stay independent and the partial Gram determinant stays +-1;
// falls back to rank alone when no unimodular extension exists
std::vector<IntVec> gram_basis(Context& c) {
  if (!c.in.gram_basis.empty()) return c.in.gram_basis;
  const std::size_t r = c.X->r, dim = c.H->total_dim();
  std::vector<IntVec> cand{IntVec()};
  for (std::size_t a = 0; a < r; ++a) {
    std::vector<IntVec> next;
    for (const auto& v : cand)
      for (long k = 0; k >= -static_cast<long>(dim); --k) {
        auto w = v;
        w.push_back(k);
        next.push_back(w);
      }
    cand = next;
  }
  std::stable_sort(cand.begin(), cand.end(), [](const IntVec& x, const IntVec& y) {
    Int sx = 0, sy = 0;
    for (const auto& t : x) sx -= t;
    for (const auto& t : y) sy -= t;
    return sx != sy ? sx < sy : x > y;
  });
  auto run = [&](bool unimodular) {
    std::vector<IntVec> out;
    Eigen::MatrixXcd rows(0, dim);
    for (const auto& xi : cand) {
      auto ps = c.C->psi(chern::KClass::line(xi));
      Eigen::MatrixXcd t(rows.rows() + 1, dim);
      t.topRows(rows.rows()) = rows;
      for (std::size_t k = 0; k < dim; ++k) t(rows.rows(), k) = ps[k];
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(t);
      lu.setThreshold(1e-9);
      if (static_cast<Eigen::Index>(lu.rank()) != t.rows()) continue;
      if (unimodular) {
        auto sel = out;
        sel.push_back(xi);
        Eigen::MatrixXd M(sel.size(), sel.size());
        for (std::size_t i = 0; i < sel.size(); ++i)
          for (std::size_t j = 0; j < sel.size(); ++j)
            M(i, j) = c.C->mukai_pairing(chern::KClass::line(sel[i]), chern::KClass::line(sel[j])).integer.get_d();
        if (std::abs(std::abs(M.determinant()) - 1) > 1e-6) continue;
      }
      rows = t;
      out.push_back(xi);
      if (out.size() == dim) break;
    }
    return out;
  };
  auto out = run(true);
  return out.size() == dim ? out : run(false);
}

struct GramData {
  std::vector<IntVec> basis;
  std::vector<std::vector<double>> mukai;
  std::vector<std::vector<Int>> rounded;
  double max_nonint = 0, max_pair_diff = 0, det = 0;
};

GramData gram(Context& c) {
  GramData g;
  g.basis = gram_basis(c);
  const std::size_t k = g.basis.size();
  Eigen::MatrixXd M(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    g.mukai.emplace_back();
    g.rounded.emplace_back();
    for (std::size_t j = 0; j < k; ++j) {
      auto L1 = chern::KClass::line(g.basis[i]), L2 = chern::KClass::line(g.basis[j]);
      auto mp = c.C->mukai_pairing(L1, L2);
      double v = mp.value.real();
      g.mukai.back().push_back(v);
      g.rounded.back().push_back(mp.integer);
      g.max_nonint = std::max({g.max_nonint, std::abs(v - std::round(v)), std::abs(mp.value.imag())});
      g.max_pair_diff = std::max(g.max_pair_diff, std::abs(c.C->sol_pairing(L1, L2) - mp.value));
      M(i, j) = mp.integer.get_d();
    }
  }
  g.det = k ? M.determinant() : 0;
  return g;
}

void cmd_gram(Context& c, Report& R, double tol, bool csv, std::string* csv_out) {
  auto g = gram(c);
  json b = json::array(), m = json::array();
  for (const auto& x : g.basis) b.push_back(ivec(x));
  for (const auto& row : g.rounded) m.push_back(ivec(row));
  R.doc["basis_xi"] = b;
  R.doc["mukai_gram"] = m;
  R.doc["det"] = num(g.det);
  R.check("full_rank", g.basis.size() == c.H->total_dim(), json{{"size", g.basis.size()}});
  R.check("integral_entries", g.max_nonint < tol, json{{"max_deviation", num(g.max_nonint)}});
  R.check("unimodular", std::abs(std::abs(std::round(g.det)) - 1) == 0, json{{"det", num(g.det)}});
  R.check("sol_pairing_equals_mukai", g.max_pair_diff < tol, json{{"max_difference", num(g.max_pair_diff)}});
  if (csv) {
    std::string s;
    for (const auto& row : g.rounded) {
      for (std::size_t j = 0; j < row.size(); ++j) s += (j ? "," : "") + row[j].get_str();
      s += "\n";
    }
    *csv_out = s;
  }
}

json laurent_json(const hypergeom::Laurent& L) {
  json o = json::object();
  for (const auto& [k, v] : L) o["z^" + std::to_string(k)] = rvec(v);
  return o;
}

void cmd_ifun(Context& c, Report& R, const Rat& cap) {
  auto I = c.G->i_function(cap);
  R.doc["cap"] = to_str(cap);
  R.doc["certified_order"] = to_str(I.certified);
  json t = json::array();
  for (const auto& q : I.terms) t.push_back(json{{"d", rvec(q.d)}, {"sector", q.sector}, {"coefficient", laurent_json(q.c)}});
  R.doc["terms"] = t;
  R.check("dropped_terms_vanish", c.G->verify_dropped_terms(cap));
}

void cmd_mirror_map(Context& c, Report& R, const Rat& cap) {
  auto mm = c.G->mirror_map(cap);
  R.doc["cap"] = to_str(cap);
  R.doc["certified_order"] = to_str(cap);
  R.doc["pure_log"] = mm.pure_log();
  json t = json::array();
  for (const auto& x : mm.terms) {
    json e{{"d", rvec(x.d)}, {"sector", x.sector}, {"kind", x.kind}, {"value", rvec(x.value)}};
    if (x.kind == "extra") e["j"] = x.j + 1;
    t.push_back(e);
  }
  R.doc["terms"] = t;
  R.doc["leading"] = "tau = sum_a pbar_a log q_a + terms";
  // extra terms must be exactly 1_{b_j} at d = D_j^vee
  bool ok = true;
  for (const auto& x : mm.terms)
    if (x.kind == "extra") {
      std::size_t sec = 0;
      RatVec expect = c.G->frak_D(x.j, &sec);
      if (sec != x.sector || expect != x.value) ok = false;
    }
  R.check("extra_terms_are_frak_D", ok);
}

void cmd_gkz(Context& c, Report& R, const Rat& cap) {
  auto gens = c.G->gkz_generators();
  auto reps = c.G->gkz_annihilation_check(gens, cap);
  json a = json::array();
  bool ok = true;
  Rat cert = cap;
  for (const auto& r : reps) {
    json e{{"d", ivec(r.d)}, {"zero", r.zero}, {"certified_order", to_str(r.certified)}};
    if (!r.zero) e["first_nonzero"] = r.first_nonzero;
    ok = ok && r.zero;
    cert = std::min(cert, r.certified);
    a.push_back(e);
  }
  R.doc["operators"] = a;
  R.doc["certified_order"] = to_str(cert);
  R.doc["summary"] = ok ? "exact zero through order " + to_str(cert) : "nonzero coefficient found";
  R.check("annihilation", ok, json{{"order", to_str(cert)}});
  auto lem = c.G->derivative_asymptotics_check();
  bool lok = true;
  for (const auto& l : lem) lok = lok && l.leading_ok && l.no_negative_terms;
  R.check("derivative_asymptotics", lok, json{{"sectors", lem.size()}});
}

void cmd_central_charge(Context& c, Report& R, const std::vector<double>& q, double z, const Rat& cap) {
  R.doc["q"] = json::array();
  for (double x : q) R.doc["q"].push_back(num(x));
  R.doc["z"] = num(z);
  R.doc["cap"] = to_str(cap);
  json vals = json::array();
  bool warn = false;
  auto add = [&](const std::string& name, const chern::KClass& V) {
    hypergeom::HValue hv;
    cplx v = c.G->central_charge(V, q, z, cap, &hv);
    warn = warn || hv.truncation_warning;
    vals.push_back(json{{"class", name}, {"Z", cnum(v)}, {"tail_estimate", num(hv.tail_estimate)}, {"terms", hv.terms}});
  };
  add("O", chern::KClass::structure_sheaf(c.X->r));
  add("O_pt", c.C->point());
  for (std::size_t a = 0; a < c.X->r; ++a) {
    IntVec xp(c.X->r, Int(0));
    xp[a] = 1;
    add("O(p" + std::to_string(a + 1) + ")", chern::KClass::line(c.B->from_p_coords(xp)));
  }
  R.doc["central_charges"] = vals;
  R.check("truncation_tail", !warn);
}

void cmd_lg(Context& c, Report& R, const std::vector<double>& q, std::size_t samples, long order) {
  auto M = mirror_lg::build_lg(*c.X, *c.B);
  R.doc["potential"] = M.describe();
  json ell = json::array();
  for (std::size_t i = 0; i < M.m; ++i) ell.push_back(rvec(M.ell.row(i)));
  R.doc["ell"] = ell;
  R.doc["components"] = M.components().size();
  R.doc["batyrev_relations"] = mirror_lg::batyrev_relations(M);

  auto vol = mirror_lg::VolumeReport{};
  try {
    vol = mirror_lg::volume_rank_check(*c.X, M, c.H->total_dim());
    R.check("volume_equals_rank", true);
  } catch (const Error& e) {
    R.check("volume_equals_rank", false, json{{"error", e.what()}});
  }
  R.doc["volume"] = json{{"fan_sum", to_str(vol.fan_sum)}, {"n_factorial_vol", to_str(vol.hull_nvol)},
                         {"torsion_order", to_str(vol.ntors)}, {"dim_H_orb", c.H->total_dim()}};

  std::vector<cplx> logq;
  for (double x : q) logq.push_back(std::log(x));
  Int per = Int(static_cast<long>(c.H->total_dim())) / M.ntors();
  try {
    auto cs = mirror_lg::jacobi_critical_points(M, logq, per, {});
    json pts = json::array();
    double worst = 0;
    IntVec dp(M.r, Int(0));
    for (const auto& p : cs.points) {
      double br = 0;
      for (std::size_t a = 0; a < M.r; ++a) {
        std::fill(dp.begin(), dp.end(), Int(0));
        dp[a] = 1;
        br = std::max(br, mirror_lg::batyrev_residual(M, dp, logq, p.w));
      }
      worst = std::max(worst, br);
      pts.push_back(json{{"component", p.component}, {"value", cnum(p.value)}, {"hessian_det", cnum(p.hess_det)},
                         {"batyrev_residual", num(br)}});
    }
    R.doc["critical_points"] = pts;
    R.check("critical_count", true, json{{"count", cs.points.size()}, {"expected", c.H->total_dim()}});
    R.check("batyrev_residual", worst < 1e-10, json{{"max", num(worst)}});
  } catch (const Error& e) {
    R.check("critical_count", false, json{{"error", e.what()}});
  }
  try {
    auto fr = mirror_lg::kouchnirenko_face_check(M, M.coefficients(logq, 0), samples);
    R.check("no_degeneracy_witness", true, json{{"faces", fr.faces}, {"starts", fr.starts}});
  } catch (const Error& e) {
    R.check("no_degeneracy_witness", false, json{{"error", e.what()}});
  }
  // residue series against the point restriction of H
  auto res = mirror_lg::residue_series(*c.X, M, order);
  std::map<RatVec, Rat> a, b;
  for (const auto& t : res) a[t.qexp] += t.coeff;
  Rat cap = 0;
  for (const auto& t : res)
    for (const auto& x : t.qexp) cap = std::max(cap, Rat(x * Rat(c.X->m + 1)));
  for (const auto& [d, v] : c.G->point_restriction(cap + 1)) {
    Rat tot = 0;
    for (std::size_t i = 0; i < c.X->m; ++i) tot += c.X->pair(i, d);
    if (tot > order) continue;
    b[c.B->p_pairings(d)] += v;
  }
  json rs = json::array();
  for (const auto& t : res)
    rs.push_back(json{{"k", ivec(t.k)}, {"q_exponent", rvec(t.qexp)}, {"z_power", t.zpow}, {"coefficient", to_str(t.coeff)}});
  R.doc["residue_series"] = rs;
  R.doc["certified_order"] = order;
  R.check("residue_equals_point_restriction", a == b, json{{"order", order}});
}

void cmd_verify(Context& c, Report& R, const std::vector<double>& q, double z, double tol, const Rat& cap) {
  auto M = mirror_lg::build_lg(*c.X, *c.B);
  oscint::QuadratureSpec spec;
  spec.digits = std::min(g_digits, 16);
  auto rep = oscint::verify_mirror_identities(*c.G, M, q, z, cap, tol, spec);
  R.doc["q"] = json::array();
  for (double x : q) R.doc["q"].push_back(num(x));
  R.doc["z"] = num(z);
  R.doc["structure_sheaf"] = json{{"real_thimble", cnum(rep.thimble)},
                                  {"quadrature_error", num(rep.thimble_error)},
                                  {"central_charge", cnum(rep.z_structure)},
                                  {"relative_residual", num(rep.str_rel)}};
  R.doc["skyscraper"] = json{{"compact_cycle", cnum(rep.compact)},
                             {"residue_series", cnum(rep.residue)},
                             {"residue_tail", num(rep.residue_tail)},
                             {"central_charge", cnum(rep.z_point)},
                             {"relative_residual_residue", num(rep.sky_rel_residue)},
                             {"relative_residual_central_charge", num(rep.sky_rel_point)}};
  R.doc["h_tail_estimate"] = num(rep.h_tail);
  R.doc["certified_order"] = to_str(cap);
  R.check("structure_sheaf_identity", rep.pass_str, json{{"tol", num(tol)}});
  R.check("skyscraper_identity", rep.pass_sky, json{{"tol", num(tol)}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toric stack mirror symmetry checks"};
  app.require_subcommand(1);
  std::string input, format = "json", qs;
  std::string order_s;
  double z = 1.0, tol = 1e-8;
  int digits = -1;
  std::size_t samples = 20;
  app.add_option("--input", input, "input document (JSON)")->required();
  app.add_option("--order", order_s, "truncation cap / order");
  app.add_option("--digits", digits, "precision digits (default from TMIR_DIGITS)");
  app.add_option("--q", qs, "comma-separated q values");
  app.add_option("--z", z, "z value");
  app.add_option("--tol", tol, "tolerance");
  app.add_option("--samples", samples, "random starts per face (lg-check)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.fallthrough();
  std::vector<std::string> names{"validate", "box",   "cohomology", "gamma",          "chi",      "gram",
                                 "ifun",     "mirror-map", "gkz-check", "central-charge", "lg-check", "verify-mirror"};
  for (const auto& n : names) app.add_subcommand(n, n);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  Context c;
  Report R;
  R.doc["schema_version"] = kSchemaVersion;
  R.doc["command"] = cmd;
  std::vector<double> q;
  Rat cap;
  try {
    c.in = read_input(input);
    if (const char* env = std::getenv("TMIR_DIGITS")) {
      try {
        g_digits = std::stoi(env);
      } catch (...) {
        throw InputError("TMIR_DIGITS is not an integer");
      }
    }
    if (c.in.digits) g_digits = *c.in.digits;
    if (digits > 0) g_digits = digits;
    special::check_digits(g_digits);
    q = qs.empty() ? c.in.q : parse_list(qs);
    if (app.count("--z") == 0 && c.in.z) z = *c.in.z;
    if (!order_s.empty()) cap = parse_rat(json(order_s), "--order");
    else cap = c.in.cap.value_or(Rat(4));
    c.X = std::make_unique<stack::InertiaData>(stack::validate(c.in.data));
    c.B = std::make_unique<stack::NefBasis>(stack::select_nef_basis(*c.X, c.in.basis, c.in.weak_fano));
    c.H = std::make_unique<cohomology::Cohomology>(*c.X, *c.B);
    c.C = std::make_unique<chern::Chern>(*c.H, g_digits);
    c.G = std::make_unique<hypergeom::Hypergeom>(*c.C);
    if ((cmd == "central-charge" || cmd == "lg-check" || cmd == "verify-mirror") && q.size() != c.X->r)
      throw InputError("need rank_L values of q (--q or input field q)");
  } catch (const InputError& e) {
    json err{{"schema_version", kSchemaVersion}, {"command", cmd}, {"error", "InputError"}, {"detail", e.what()}};
    std::cout << err.dump(2) << "\n";
    return 2;
  } catch (const Error& e) {
    json err{{"schema_version", kSchemaVersion}, {"command", cmd}, {"error", e.code()}, {"detail", e.detail()}};
    std::cout << err.dump(2) << "\n";
    return 2;
  }
  R.doc["digits"] = g_digits;
  R.doc["conventions"] = conventions();

  std::string csv;
  const bool want_csv = format == "csv";
  try {
    if (cmd == "validate") cmd_validate(c, R);
    else if (cmd == "box") {
      R.doc["box"] = box_json(*c.X);
      R.check("box_enumerated", !c.X->box.empty());
      csv = box_csv(*c.X);
    } else if (cmd == "cohomology") cmd_cohomology(c, R);
    else if (cmd == "gamma") cmd_gamma(c, R, static_cast<std::size_t>(cap.get_d()), app.count("--tol") ? tol : 1e-10);
    else if (cmd == "chi") cmd_chi(c, R, static_cast<long>(cap.get_d()));
    else if (cmd == "gram") cmd_gram(c, R, tol, want_csv, &csv);
    else if (cmd == "ifun") cmd_ifun(c, R, cap);
    else if (cmd == "mirror-map") cmd_mirror_map(c, R, cap);
    else if (cmd == "gkz-check") cmd_gkz(c, R, cap);
    else if (cmd == "central-charge") cmd_central_charge(c, R, q, z, order_s.empty() && !c.in.cap ? Rat(14) : cap);
    else if (cmd == "lg-check") cmd_lg(c, R, q, samples, order_s.empty() && !c.in.cap ? 8 : static_cast<long>(cap.get_d()));
    else if (cmd == "verify-mirror")
      cmd_verify(c, R, q, z, app.count("--tol") ? tol : 1e-6, order_s.empty() && !c.in.cap ? Rat(14) : cap);
  } catch (const Error& e) {
    R.check("completed", false, json{{"error", e.code()}, {"detail", e.detail()}});
  }
  R.doc["checks"] = R.checks;
  R.doc["pass"] = R.pass();
  if (want_csv) {
    if (csv.empty()) {
      std::cerr << "csv output is only available for box and gram\n";
      return 2;
    }
    std::cout << csv;
  } else {
    std::cout << R.doc.dump(2) << "\n";
  }
  return R.pass() ? 0 : 1;
}
