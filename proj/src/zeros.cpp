#include "race/lfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace race {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Lanczos approximation, g = 7, 9 terms; relative error ~1e-14 for Re z > 0.
cplx log_gamma(cplx z) {
    static const std::array<double, 9> c = {
        0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
    cplx a = c[0];
    for (int k = 1; k < 9; ++k) a += c[k] / (z - 1.0 + static_cast<double>(k));
    cplx w = z + 6.5;
    return 0.5 * std::log(2.0 * kPi) + (z - 0.5) * std::log(w) - w + std::log(a);
}

// B_2 .. B_24; the critical-line Euler-Maclaurin uses twelve corrections.
constexpr std::array<double, 12> kBern = {
    1.0 / 6.0,       -1.0 / 30.0,      1.0 / 42.0,
    -1.0 / 30.0,     5.0 / 66.0,       -691.0 / 2730.0,
    7.0 / 6.0,       -3617.0 / 510.0,  43867.0 / 798.0,
    -174611.0 / 330.0, 854513.0 / 138.0, -236364091.0 / 2730.0};

constexpr int kNumBern = 12;

/**
 * Evaluates L(1/2 + it, chi) for a primitive nonprincipal chi by
 * Euler-Maclaurin on the Hurwitz decomposition.  K grows like 0.4 t so the
 * correction series keeps ratio < 0.4; build one evaluator per scan block.
 */
class LineEvaluator {
  public:
    LineEvaluator(const DirichletCharacter& chi, double t_max)
        : q_(chi.modulus()), K_(static_cast<int>(std::ceil(0.4 * t_max)) + 25) {
        double qd = static_cast<double>(q_);
        logq_ = std::log(qd);
        for (int64_t a = 1; a < q_; ++a) {
            if (gcd64(a, q_) != 1) continue;
            cplx ca = chi(a);
            double x = static_cast<double>(a) / qd;
            for (int k = 0; k < K_; ++k) {
                double v = k + x;
                amp_.push_back(1.0 / std::sqrt(v));
                lg_.push_back(std::log(v));
                chv_.push_back(ca);
            }
            CorrA c;
            c.chi = ca;
            double W = K_ + x;
            c.LW = std::log(W);
            c.Wh = 1.0 / std::sqrt(W);
            c.W = W;
            double wp = 1.0 / W;  // W^{1-2r} starting at r = 1
            for (int r = 0; r < kNumBern; ++r) {
                c.pw[r] = wp;
                wp /= W * W;
            }
            corr_.push_back(c);
        }
    }

    int64_t q() const { return q_; }
    size_t terms() const { return amp_.size(); }

    void init_state(double t, std::vector<cplx>& z) const {
        z.resize(terms());
        for (size_t i = 0; i < terms(); ++i)
            z[i] = amp_[i] * chv_[i] * std::polar(1.0, -t * lg_[i]);
    }

    void make_rot(double dt, std::vector<cplx>& r) const {
        r.resize(terms());
        for (size_t i = 0; i < terms(); ++i) r[i] = std::polar(1.0, -dt * lg_[i]);
    }

    // Tail of the Hurwitz sums: pole + half + Bernoulli corrections, summed
    // against chi(a), then the q^{-s} prefactor applied to (main + this).
    cplx L_from_main(double t, cplx main) const {
        cplx s(0.5, t);
        // (s)_{2r-1} for r = 1..kNumBern
        std::array<cplx, kNumBern> poch;
        cplx run = 1.0;
        int j = 0;
        for (int r = 1; r <= kNumBern; ++r) {
            while (j < 2 * r - 1) {
                run *= s + static_cast<double>(j);
                ++j;
            }
            poch[r - 1] = run;
        }
        std::array<double, kNumBern> coef;
        double fact = 1.0;
        for (int r = 1; r <= kNumBern; ++r) {
            fact *= (2.0 * r - 1.0) * (2.0 * r);
            coef[r - 1] = kBern[r - 1] / fact;
        }
        cplx tail = 0.0;
        cplx sm1 = s - 1.0;
        for (const auto& c : corr_) {
            cplx ws = c.Wh * std::polar(1.0, -t * c.LW);  // W^{-s}
            cplx v = c.W * ws / sm1 + 0.5 * ws;
            cplx bern = 0.0;
            for (int r = 0; r < kNumBern; ++r)
                bern += coef[r] * poch[r] * c.pw[r];
            v += bern * ws;
            tail += c.chi * v;
        }
        cplx qs = std::polar(1.0 / std::sqrt(static_cast<double>(q_)), -t * logq_);
        return qs * (main + tail);
    }

    cplx L_half(double t) const {
        cplx main = 0.0;
        for (size_t i = 0; i < terms(); ++i)
            main += amp_[i] * chv_[i] * std::polar(1.0, -t * lg_[i]);
        return L_from_main(t, main);
    }

  private:
    struct CorrA {
        cplx chi;
        double LW, Wh, W;
        std::array<double, kNumBern> pw;  // W^{1-2r}
    };

    int64_t q_;
    int K_;
    double logq_;
    std::vector<double> amp_, lg_;
    std::vector<cplx> chv_;
    std::vector<CorrA> corr_;
};

// Hardy-style rotation making Z(t) = Re(rot * L) real on the line.
struct Rotation {
    double half_log_q_pi;
    double gamma_shift;   // (1/2 + a)/2
    double eps_arg_half;  // arg(root number)/2

    Rotation(const DirichletCharacter& star) {
        int aa = (1 - star.parity()) / 2;
        half_log_q_pi = 0.5 * std::log(static_cast<double>(star.modulus()) / kPi);
        gamma_shift = 0.25 + 0.5 * aa;
        eps_arg_half = 0.5 * std::arg(root_number(star));
    }

    cplx operator()(double t) const {
        double th = t * half_log_q_pi +
                    std::imag(log_gamma(cplx(gamma_shift, 0.5 * t))) -
                    eps_arg_half;
        return std::polar(1.0, th);
    }
};

double refine_zero(const std::function<double(double)>& f, double a, double b,
                   double fa, double fb) {
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        double t = a - fa * (b - a) / (fb - fa);  // secant
        double w = b - a;
        if (!(t > a + 0.01 * w && t < b - 0.01 * w)) t = 0.5 * (a + b);
        double ft = f(t);
        if ((ft < 0.0) == (fa < 0.0)) {
            a = t;
            fa = ft;
        } else {
            b = t;
            fb = ft;
        }
    }
    return 0.5 * (a + b);
}

// Sign-change scan over (0, T]; step_scale < 1 tightens the scan.
std::vector<double> scan_zeros(const DirichletCharacter& star, double T,
                               double step_scale) {
    int64_t qs = star.modulus();
    Rotation rot(star);
    std::vector<double> zeros;
    std::vector<double> edges{0.0};
    if (T > 10.0) edges.push_back(10.0);
    for (double e = 250.0; e < T; e += 250.0) edges.push_back(e);
    edges.push_back(T);

    for (size_t bi = 0; bi + 1 < edges.size(); ++bi) {
        double lo = std::max(edges[bi], 1e-3), hi = edges[bi + 1];
        if (hi <= lo) continue;
        LineEvaluator ev(star, hi + 1.0);
        auto zfun = [&](double t) { return (rot(t) * ev.L_half(t)).real(); };
        double dens = std::max(1.0, std::log(qs * std::max(hi, 10.0) / (2.0 * kPi)));
        double step = step_scale * 0.2 * kPi / dens;
        int m = static_cast<int>(std::ceil((hi - lo) / step));
        double dt = (hi - lo) / m;
        std::vector<cplx> state, rotv;
        ev.init_state(lo, state);
        ev.make_rot(dt, rotv);
        double t_prev = lo;
        double z_prev = zfun(lo);
        for (int i = 1; i <= m; ++i) {
            double t = lo + i * dt;
            cplx main = 0.0;
            for (size_t k = 0; k < state.size(); ++k) {
                state[k] *= rotv[k];
                main += state[k];
            }
            if (i % 256 == 0) ev.init_state(t, state);
            double z = (rot(t) * ev.L_from_main(t, main)).real();
            if ((z < 0.0) != (z_prev < 0.0)) {
                double g = refine_zero(zfun, t_prev, t, z_prev, z);
                if (g > 0.0 && g <= T + 1e-9) zeros.push_back(g);
            }
            t_prev = t;
            z_prev = z;
        }
    }
    return zeros;
}

// Window + b(chi) consistency for one real character or a conjugate pair.
// `pos_sum` is sum over located ordinates (both lists for a pair) of
// (1/4+gamma^2)^{-1} counted once per gamma > 0.  A surplus of almost exactly
// 4m in the b(chi) identity is the signature of an m-fold zero at the central
// point gamma = 0 (which the sign-change scan over (0, T] cannot see); such a
// zero is reported through `central` rather than treated as a failure.
bool lists_consistent(const DirichletCharacter& star, double T,
                      int64_t count_both_signs, double full_positive_sum,
                      std::string* why, int* central) {
    *central = 0;
    if (T >= 100.0) {
        double diff = b_chi_closed(star) - 2.0 * full_positive_sum;
        double tail = zero_tail_bound(star.modulus(), T, 1);
        int m = 0;
        if (diff < -1e-6) {
            *why = "b(chi) partial-sum consistency failed";
            return false;
        }
        if (diff > tail + 1e-6) {
            m = static_cast<int>(std::lround(diff / 4.0));
            double residual = diff - 4.0 * m;
            if (m < 1 || residual < -1e-3 || residual > tail + 1e-3) {
                *why = "b(chi) partial-sum consistency failed";
                return false;
            }
        }
        auto w = N_T_bounds(star.modulus(), T);
        if (count_both_signs + m > w.upper + 0.5 ||
            count_both_signs + m < w.lower - 0.5) {
            *why = "zero count outside McCurley window";
            return false;
        }
        *central = m;
    }
    return true;
}

ZeroList make_list(const DirichletCharacter& chi,
                   const DirichletCharacter& star, double T,
                   std::vector<double> g) {
    ZeroList zl;
    zl.q = chi.modulus();
    zl.label = chi.label();
    zl.conductor = star.modulus();
    zl.ordinates = std::move(g);
    zl.height = T;
    zl.source = "internal-finder";
    return zl;
}

double positive_sum(const std::vector<double>& g) {
    double s = 0.0;
    for (double x : g) s += 1.0 / (0.25 + x * x);
    return s;
}

DirichletCharacter lift_checked(const DirichletCharacter& chi, double T) {
    if (chi.is_principal())
        throw std::invalid_argument("find_zeros: principal character");
    auto star = CharacterGroup::primitive_lift(chi);
    if (star.modulus() > 200)
        throw std::invalid_argument("find_zeros: conductor " +
                                    std::to_string(star.modulus()) +
                                    " above supported envelope (200)");
    if (T > 5000.0) throw std::invalid_argument("find_zeros: T > 5000");
    return star;
}

}  // namespace

cplx root_number(const DirichletCharacter& chi_star) {
    int64_t q = chi_star.modulus();
    if (chi_star.conductor() != q)
        throw std::invalid_argument("root_number: character not primitive");
    cplx tau = 0.0;
    for (int64_t a = 1; a <= q; ++a)
        tau += chi_star(a) * std::polar(1.0, 2.0 * kPi * a / q);
    int aa = (1 - chi_star.parity()) / 2;
    cplx eps = tau / (std::pow(cplx(0.0, 1.0), aa) * std::sqrt(static_cast<double>(q)));
    if (std::abs(std::abs(eps) - 1.0) > 1e-10)
        throw std::runtime_error("root_number: |epsilon| deviates from 1");
    return eps;
}

double hard_zero_function(const DirichletCharacter& chi_star, double t) {
    auto star = CharacterGroup::primitive_lift(chi_star);
    LineEvaluator ev(star, t + 1.0);
    Rotation rot(star);
    return (rot(t) * ev.L_half(t)).real();
}

ZeroList find_zeros(const DirichletCharacter& chi, double T) {
    auto star = lift_checked(chi, T);
    if (!star.is_real()) return find_zeros_pair(chi, T).first;
    std::string why;
    int central = 0;
    for (double scale : {1.0, 0.25}) {
        auto g = scan_zeros(star, T, scale);
        if (lists_consistent(star, T, 2 * static_cast<int64_t>(g.size()),
                             positive_sum(g), &why, &central)) {
            auto zl = make_list(chi, star, T, std::move(g));
            zl.central = central;
            return zl;
        }
    }
    throw std::runtime_error("find_zeros: missing-zero alarm for q*=" +
                             std::to_string(star.modulus()) + " chi=" +
                             std::to_string(star.label()) + " (" + why + ")");
}

std::pair<ZeroList, ZeroList> find_zeros_pair(const DirichletCharacter& chi,
                                              double T) {
    auto star = lift_checked(chi, T);
    auto group = CharacterGroup::get(star.modulus());
    auto conj_star = group->character(star.conjugate_label());
    std::string why;
    int central = 0;
    for (double scale : {1.0, 0.25}) {
        auto g1 = scan_zeros(star, T, scale);
        auto g2 = scan_zeros(conj_star, T, scale);
        int64_t count = static_cast<int64_t>(g1.size() + g2.size());
        double psum = 0.5 * (positive_sum(g1) + positive_sum(g2));
        if (lists_consistent(star, T, count, psum, &why, &central)) {
            auto conj_chi = CharacterGroup::get(chi.modulus())
                                ->character(chi.conjugate_label());
            auto z1 = make_list(chi, star, T, std::move(g1));
            auto z2 = make_list(conj_chi, conj_star, T, std::move(g2));
            z1.central = z2.central = central;
            return {std::move(z1), std::move(z2)};
        }
    }
    throw std::runtime_error("find_zeros: missing-zero alarm for q*=" +
                             std::to_string(star.modulus()) + " pair chi=" +
                             std::to_string(star.label()) + " (" + why + ")");
}

// -----------------------------------------------------------------------------
// File IO
// -----------------------------------------------------------------------------

ZeroList load_zeros(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_zeros: cannot open " + path);
    ZeroList zl;
    zl.source = "file";
    double header_height = -1.0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            std::string body = line.substr(first + 1);
            auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            std::string key = body.substr(0, eq), val = body.substr(eq + 1);
            key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
            if (key == "q") zl.q = std::stoll(val);
            else if (key == "chi") zl.label = std::stoll(val);
            else if (key == "height") header_height = std::stod(val);
            else if (key == "central") zl.central = std::stoi(val);
            continue;
        }
        size_t pos = 0;
        double g;
        try {
            g = std::stod(line.substr(first), &pos);
        } catch (const std::exception&) {
            throw std::runtime_error("load_zeros: parse error at line " +
                                     std::to_string(lineno));
        }
        if (!(g > 0.0))
            throw std::runtime_error("load_zeros: nonpositive ordinate at line " +
                                     std::to_string(lineno));
        if (!zl.ordinates.empty() && g <= zl.ordinates.back())
            throw std::runtime_error("load_zeros: out-of-order ordinate at line " +
                                     std::to_string(lineno));
        zl.ordinates.push_back(g);
    }
    if (zl.ordinates.empty() && header_height < 0.0)
        throw std::runtime_error("load_zeros: no data in " + path);
    zl.height = header_height >= 0.0
                    ? header_height
                    : (zl.ordinates.empty() ? 0.0 : zl.ordinates.back());
    if (zl.q > 0) {
        if (zl.label <= 0 || gcd64(zl.label % zl.q == 0 ? zl.q : zl.label, zl.q) != 1)
            throw std::runtime_error("load_zeros: label/modulus mismatch in " + path);
        zl.conductor =
            CharacterGroup::get(zl.q)->character(zl.label % zl.q).conductor();
    }
    return zl;
}

void save_zeros(const ZeroList& zl, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_zeros: cannot open " + path);
    out << "# q=" << zl.q << "\n# chi=" << zl.label << "\n# height=";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", zl.height);
    out << buf << "\n";
    if (zl.central > 0) out << "# central=" << zl.central << "\n";
    for (double g : zl.ordinates) {
        std::snprintf(buf, sizeof buf, "%.10f", g);
        out << buf << "\n";
    }
    if (!out) throw std::runtime_error("save_zeros: write failed for " + path);
}

// -----------------------------------------------------------------------------
// ZeroCache
// -----------------------------------------------------------------------------

ZeroCache::ZeroCache(std::string dir) : dir_(std::move(dir)) {
    if (dir_.empty()) {
        if (const char* env = std::getenv("RACE_ZEROS_DIR")) dir_ = env;
        else dir_ = "zeros";
    }
}

ZeroList ZeroCache::get(const DirichletCharacter& chi_star, double T) {
    auto star = CharacterGroup::primitive_lift(chi_star);
    auto path_for = [&](const DirichletCharacter& c) {
        return dir_ + "/q" + std::to_string(c.modulus()) + ".chi" +
               std::to_string(c.label()) + ".txt";
    };
    std::string path = path_for(star);
    if (std::filesystem::exists(path)) {
        ZeroList zl = load_zeros(path);
        if (zl.q != star.modulus() || zl.label != star.label())
            throw std::runtime_error("ZeroCache: header mismatch in " + path);
        if (zl.height >= T - 1e-9) return zl;
    }
    std::filesystem::create_directories(dir_);
    if (star.is_real()) {
        ZeroList zl = find_zeros(star, T);
        save_zeros(zl, path);
        return zl;
    }
    auto [zl, zconj] = find_zeros_pair(star, T);
    save_zeros(zl, path);
    auto group = CharacterGroup::get(star.modulus());
    save_zeros(zconj, path_for(group->character(star.conjugate_label())));
    return zl;
}

}  // namespace race
