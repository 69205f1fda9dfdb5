#include "condreg/sup_regression.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

#include "condreg/synthetic.hpp"

namespace condreg {

namespace {

// Residual slack when classifying violators, so examples sitting exactly on
// the extremal residual are not eliminated by round-off.
constexpr double kResidualTol = 1e-9;

// Desk-scale guards: sign ranks must fit 8 bits and tuple ranks 56 bits so a
// (signs, tuple) key packs into one atomic word.
constexpr std::size_t kMaxSparsity = 6;
constexpr std::uint64_t kMaxTuples = 1ULL << 56;

} // namespace

std::uint64_t combination_count(std::size_t m, std::size_t t) {
    if (t > m) return 0;
    unsigned __int128 acc = 1;
    for (std::size_t i = 0; i < t; ++i) {
        acc = acc * (m - i) / (i + 1);
        if (acc > (static_cast<unsigned __int128>(1) << 62))
            throw std::domain_error("combination space exceeds 2^62; out of desk-scale range");
    }
    return static_cast<std::uint64_t>(acc);
}

std::vector<std::size_t> unrank_combination(std::size_t m, std::size_t t,
                                            std::uint64_t rank) {
    std::vector<std::size_t> combo(t);
    std::uint64_t r = rank;
    std::size_t base = 0;
    for (std::size_t pos = 0; pos < t; ++pos) {
        const std::size_t tr = t - pos;
        const std::uint64_t total = combination_count(m - base, tr);
        std::size_t lo = base, hi = m - tr;
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            std::uint64_t covered = total - combination_count(m - mid - 1, tr);
            if (covered > r) hi = mid;
            else lo = mid + 1;
        }
        combo[pos] = lo;
        r -= total - combination_count(m - lo, tr);
        base = lo + 1;
    }
    return combo;
}

bool next_combination(std::vector<std::size_t>& combo, std::size_t m) {
    const std::size_t t = combo.size();
    std::size_t i = t;
    while (i-- > 0) {
        if (combo[i] + 1 <= m - t + i) {
            ++combo[i];
            for (std::size_t j = i + 1; j < t; ++j) combo[j] = combo[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::size_t sample_size(const TaskParams& params, std::size_t n, std::size_t d) {
    if (!(params.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(params.mu > 0.0 && params.mu <= 1.0))
        throw std::invalid_argument("mu must be in (0,1]");
    if (!(params.gamma > 0.0 && params.gamma <= 0.5))
        throw std::invalid_argument("gamma must be in (0,1/2]");
    if (!(params.delta > 0.0 && params.delta <= 1.0))
        throw std::invalid_argument("delta must be in (0,1]");
    if (params.k < 1 || n < 1 || d < 1)
        throw std::invalid_argument("need k >= 1, n >= 1, d >= 1");

    const double nk = std::pow(static_cast<double>(n), static_cast<double>(params.k));
    if (nk > 1099511627776.0) // 2^40
        throw std::domain_error("n^k beyond 2^40; parameters out of desk-scale range");

    const double s = static_cast<double>(params.sparsity);
    const double body = s * std::log(std::max(s, 2.0)) + s * std::log(static_cast<double>(d)) +
                        nk + std::log(1.0 / params.delta);
    const double c = 6.0;
    double v = std::ceil(c / (params.mu * params.gamma) * body);
    return static_cast<std::size_t>(std::max(v, 1.0));
}

void CandidateBasis::validate(std::size_t d, std::size_t m, std::size_t s) const {
    if (dims.size() != s) throw std::invalid_argument("basis has wrong dims count");
    if (signs.size() != s + 1 || example_ids.size() != s + 1)
        throw std::invalid_argument("basis needs s+1 signs and example ids");
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] >= d) throw std::invalid_argument("basis dim out of range");
        if (i > 0 && dims[i] <= dims[i - 1])
            throw std::invalid_argument("basis dims not sorted/distinct");
    }
    for (std::size_t i = 0; i < example_ids.size(); ++i) {
        if (example_ids[i] >= m) throw std::invalid_argument("basis example id out of range");
        if (i > 0 && example_ids[i] <= example_ids[i - 1])
            throw std::invalid_argument("basis example ids not sorted/distinct");
    }
    for (int sg : signs)
        if (sg != 1 && sg != -1) throw std::invalid_argument("basis signs must be +-1");
}

namespace {

// ---------------------------------------------------------------------------
// Shared per-run state: the trivial k-DNF, its match masks, and thresholds.
// ---------------------------------------------------------------------------

struct ScanContext {
    const Dataset& ds;
    const TaskParams& params;
    KDnf trivial;
    TermMatcher matcher;
    double threshold; // coverage must strictly exceed this
    double eps_tol;   // epsilon + kResidualTol
    std::size_t m, s, q;

    ScanContext(const Dataset& dataset, const TaskParams& p)
        : ds(dataset),
          params(p),
          trivial(trivial_kdnf(dataset.attr_count(), p.k)),
          matcher(trivial, dataset),
          threshold((1.0 - p.gamma / 2.0) * p.mu * static_cast<double>(dataset.size())),
          eps_tol(p.epsilon + kResidualTol),
          m(dataset.size()),
          s(p.sparsity),
          q(p.sparsity + 1) {}
};

std::uint64_t violator_word(std::size_t s, const double* const* proj, const double* a,
                            const double* z, std::size_t j0, std::size_t j1,
                            double eps_tol) {
    std::uint64_t word = 0;
    switch (s) {
        case 0:
            for (std::size_t j = j0; j < j1; ++j)
                if (std::abs(z[j]) > eps_tol) word |= 1ULL << (j - j0);
            break;
        case 1: {
            const double* p0 = proj[0];
            const double a0 = a[0];
            for (std::size_t j = j0; j < j1; ++j)
                if (std::abs(a0 * p0[j] - z[j]) > eps_tol) word |= 1ULL << (j - j0);
            break;
        }
        case 2: {
            const double* p0 = proj[0];
            const double* p1 = proj[1];
            const double a0 = a[0], a1 = a[1];
            for (std::size_t j = j0; j < j1; ++j)
                if (std::abs(a0 * p0[j] + a1 * p1[j] - z[j]) > eps_tol)
                    word |= 1ULL << (j - j0);
            break;
        }
        default:
            for (std::size_t j = j0; j < j1; ++j) {
                double pred = 0.0;
                for (std::size_t i = 0; i < s; ++i) pred += a[i] * proj[i][j];
                if (std::abs(pred - z[j]) > eps_tol) word |= 1ULL << (j - j0);
            }
    }
    return word;
}

struct ScanWorkspace {
    BitVec violators;
    BitVec or_acc;
    std::vector<std::uint32_t> alive;
};

// Violator scan over all m examples with escalating checkpoints. As soon as
// the union of the still-alive term masks can no longer exceed the coverage
// threshold the candidate is rejected without finishing the pass.
std::optional<std::pair<std::vector<std::uint32_t>, std::size_t>> eliminate_scan(
    const ScanContext& ctx, const double* const* proj, const double* a,
    ScanWorkspace& ws) {
    const std::size_t m = ctx.m;
    const std::size_t nwords = (m + 63) / 64;
    const double* z = ctx.ds.z().data();

    if (ws.violators.size() != m) {
        ws.violators = BitVec(m);
        ws.or_acc = BitVec(m);
    } else {
        ws.violators.clear_all();
    }
    ws.alive.resize(ctx.matcher.term_count());
    for (std::size_t t = 0; t < ws.alive.size(); ++t)
        ws.alive[t] = static_cast<std::uint32_t>(t);

    auto union_bound = [&]() {
        ws.or_acc.clear_all();
        for (auto id : ws.alive) ws.or_acc |= ctx.matcher.mask(id);
        return ws.or_acc.count();
    };

    std::size_t w_pruned = 0;   // masks checked against violator words < w_pruned
    std::size_t next_check = 1; // in words
    for (std::size_t w = 0; w < nwords; ++w) {
        const std::size_t j0 = w * 64, j1 = std::min(m, j0 + 64);
        ws.violators.or_word(w, violator_word(ctx.s, proj, a, z, j0, j1, ctx.eps_tol));
        if (w + 1 == next_check || w + 1 == nwords) {
            bool died = false;
            std::size_t kept = 0;
            for (std::size_t i = 0; i < ws.alive.size(); ++i) {
                if (ctx.matcher.mask(ws.alive[i])
                        .intersects_words(ws.violators, w_pruned, w + 1)) {
                    died = true;
                } else {
                    ws.alive[kept++] = ws.alive[i];
                }
            }
            ws.alive.resize(kept);
            w_pruned = w + 1;
            next_check *= 4;
            if (died && w + 1 < nwords) {
                if (static_cast<double>(union_bound()) <= ctx.threshold)
                    return std::nullopt;
            }
        }
    }
    std::size_t coverage = union_bound();
    return std::make_pair(ws.alive, coverage);
}

// Cofactors of the -sigma column: A[l] = (-1)^(l+q) det(Y minus row l).
// eps' for a sign pattern is then -det_z / sum_l sigma_l A[l].
void column_cofactors(const double* const* proj, const std::size_t* ids, std::size_t s,
                      double* A) {
    const std::size_t q = s + 1;
    if (s == 0) {
        A[0] = 1.0;
        return;
    }
    if (s == 1) {
        A[0] = -proj[0][ids[1]];
        A[1] = proj[0][ids[0]];
        return;
    }
    if (s == 2) {
        const double y10 = proj[0][ids[0]], y11 = proj[1][ids[0]];
        const double y20 = proj[0][ids[1]], y21 = proj[1][ids[1]];
        const double y30 = proj[0][ids[2]], y31 = proj[1][ids[2]];
        A[0] = y20 * y31 - y21 * y30;
        A[1] = -(y10 * y31 - y11 * y30);
        A[2] = y10 * y21 - y11 * y20;
        return;
    }
    // generic: tiny determinant per deleted row
    std::vector<double> sub(s * s);
    for (std::size_t del = 0; del < q; ++del) {
        std::size_t r = 0;
        for (std::size_t l = 0; l < q; ++l) {
            if (l == del) continue;
            for (std::size_t c = 0; c < s; ++c) sub[r * s + c] = proj[c][ids[l]];
            ++r;
        }
        double det = 1.0;
        std::vector<double> tmp = sub;
        for (std::size_t col = 0; col < s; ++col) {
            std::size_t best = col;
            for (std::size_t row = col + 1; row < s; ++row)
                if (std::abs(tmp[row * s + col]) > std::abs(tmp[best * s + col])) best = row;
            if (tmp[best * s + col] == 0.0) {
                det = 0.0;
                break;
            }
            if (best != col) {
                for (std::size_t c = 0; c < s; ++c)
                    std::swap(tmp[col * s + c], tmp[best * s + c]);
                det = -det;
            }
            det *= tmp[col * s + col];
            for (std::size_t row = col + 1; row < s; ++row) {
                double f = tmp[row * s + col] / tmp[col * s + col];
                for (std::size_t c = col; c < s; ++c) tmp[row * s + c] -= f * tmp[col * s + c];
            }
        }
        A[del] = ((q - 1 - del) % 2 == 0 ? det : -det);
    }
}

// Conservative fit-count histogram over rule-coefficient space (s <= 2).
// count[cell] upper-bounds, for every rule a in the cell's dilated
// neighborhood, how many examples can have residual <= eps_tol. Candidates
// whose cell cannot beat the coverage threshold are rejected without a scan:
// covered examples are never violators, so coverage <= fit count.
struct CandidateGrid {
    int nc = 0;
    double R = 0.0, cell = 0.0, inv_cell = 0.0;
    std::size_t s = 0;
    std::uint32_t threshold_count = 0; // reject when count <= this
    std::vector<std::uint32_t> count;  // column-major for s=2

    bool rejects(const double* a) const {
        if (std::abs(a[0]) >= R) return false; // outside the modeled range
        int ci = static_cast<int>((a[0] + R) * inv_cell);
        if (ci < 0 || ci >= nc) return false;
        if (s == 1) return count[ci] <= threshold_count;
        if (std::abs(a[1]) >= R) return false;
        int ri = static_cast<int>((a[1] + R) * inv_cell);
        if (ri < 0 || ri >= nc) return false;
        return count[static_cast<std::size_t>(ci) * nc + ri] <= threshold_count;
    }
};

CandidateGrid build_candidate_grid(const ScanContext& ctx, const double* const* proj) {
    CandidateGrid g;
    g.s = ctx.s;
    g.nc = ctx.s == 1 ? 65536 : 2048;
    const double* z = ctx.ds.z().data();
    double zmax = 0.0;
    for (std::size_t j = 0; j < ctx.m; ++j) zmax = std::max(zmax, std::abs(z[j]));
    g.R = 8.0 * (1.0 + zmax);
    g.cell = 2.0 * g.R / g.nc;
    g.inv_cell = 1.0 / g.cell;
    g.threshold_count = static_cast<std::uint32_t>(std::max(0.0, ctx.threshold));

    const double dil = 2.0 * g.cell; // covers candidate round-off
    if (ctx.s == 1) {
        g.count.assign(g.nc + 1, 0);
        const double* p0 = proj[0];
        for (std::size_t j = 0; j < ctx.m; ++j) {
            const double y0 = p0[j], zj = z[j];
            const double mark_eps =
                ctx.eps_tol * (1.0 + 1e-9) + 1e-12 * (std::abs(zj) + g.R * std::abs(y0));
            double lo, hi;
            if (y0 == 0.0) {
                if (std::abs(zj) > mark_eps) continue;
                lo = -g.R;
                hi = g.R;
            } else {
                lo = (zj - mark_eps) / y0;
                hi = (zj + mark_eps) / y0;
                if (lo > hi) std::swap(lo, hi);
            }
            double cd0 = std::floor((lo - dil + g.R) * g.inv_cell);
            double cd1 = std::floor((hi + dil + g.R) * g.inv_cell);
            int c0 = cd0 < 0.0 ? 0 : static_cast<int>(std::min(cd0, double(g.nc)));
            int c1 = cd1 < 0.0 ? -1 : static_cast<int>(std::min(cd1, double(g.nc - 1)));
            if (c0 > c1) continue;
            g.count[c0] += 1;
            g.count[c1 + 1] -= 1;
        }
        std::uint32_t acc = 0;
        for (int c = 0; c < g.nc; ++c) {
            acc += g.count[c];
            g.count[c] = acc;
        }
        g.count.resize(g.nc);
        return g;
    }

    // s == 2: per example, rasterize the slab |a0 y0 + a1 y1 - z| <= mark_eps
    // column by column with difference marks, then prefix-sum the columns.
    g.count.assign(static_cast<std::size_t>(g.nc) * (g.nc + 1), 0);
    const double* p0 = proj[0];
    const double* p1 = proj[1];
    for (std::size_t j = 0; j < ctx.m; ++j) {
        const double y0 = p0[j], y1 = p1[j], zj = z[j];
        const double mark_eps = ctx.eps_tol * (1.0 + 1e-9) +
                                1e-12 * (std::abs(zj) + g.R * (std::abs(y0) + std::abs(y1)));
        for (int ci = 0; ci < g.nc; ++ci) {
            const double x0 = -g.R + ci * g.cell - dil;
            const double x1 = -g.R + (ci + 1) * g.cell + dil;
            const double t0 = x0 * y0, t1 = x1 * y0;
            const double lo_term = std::min(t0, t1), hi_term = std::max(t0, t1);
            const double L = zj - mark_eps - hi_term;
            const double U = zj + mark_eps - lo_term;
            int r0, r1;
            if (y1 == 0.0) {
                if (L > 0.0 || U < 0.0) continue;
                r0 = 0;
                r1 = g.nc - 1;
            } else {
                double a1lo = L / y1, a1hi = U / y1;
                if (a1lo > a1hi) std::swap(a1lo, a1hi);
                double rd0 = std::floor((a1lo - dil + g.R) * g.inv_cell);
                double rd1 = std::floor((a1hi + dil + g.R) * g.inv_cell);
                r0 = rd0 < 0.0 ? 0 : static_cast<int>(std::min(rd0, double(g.nc)));
                r1 = rd1 < 0.0 ? -1 : static_cast<int>(std::min(rd1, double(g.nc - 1)));
                if (r0 > r1) continue;
            }
            auto* col = g.count.data() + static_cast<std::size_t>(ci) * (g.nc + 1);
            col[r0] += 1;
            col[r1 + 1] -= 1;
        }
    }
    std::vector<std::uint32_t> packed(static_cast<std::size_t>(g.nc) * g.nc);
    for (int ci = 0; ci < g.nc; ++ci) {
        const auto* col = g.count.data() + static_cast<std::size_t>(ci) * (g.nc + 1);
        std::uint32_t acc = 0;
        for (int r = 0; r < g.nc; ++r) {
            acc += col[r];
            packed[static_cast<std::size_t>(ci) * g.nc + r] = acc;
        }
    }
    g.count = std::move(packed);
    return g;
}

struct CandidatePayload {
    std::vector<std::uint32_t> surviving;
    std::vector<double> a;
    double eps_prime = 0.0;
    std::size_t coverage = 0;
    std::vector<std::size_t> ids;
    std::uint32_t sign_rank = 0;
    std::uint64_t tuple_rank = 0;
};

struct DimsScanState {
    std::atomic<std::uint64_t> next_block{0};
    std::atomic<std::uint64_t> best_packed{UINT64_MAX};
    std::mutex mu;
    std::uint64_t best_key = UINT64_MAX;
    CandidatePayload payload;
};

std::uint64_t pack_key(std::uint32_t sign_rank, std::uint64_t tuple_rank) {
    return (static_cast<std::uint64_t>(sign_rank) << 56) | tuple_rank;
}

// Full evaluation of one tuple: sign loop, candidate-grid filter,
// authoritative solve, violator scan. `A` and `det_z` come from the cheap
// cofactor pass.
void evaluate_tuple(const ScanContext& ctx, const double* const* proj,
                    const std::size_t* ids, std::uint64_t tuple_rank, const double* A,
                    double det_z, const CandidateGrid* grid, DimsScanState& st,
                    ScanWorkspace& ws) {
    const std::size_t s = ctx.s, q = ctx.q;
    const std::uint32_t nsigns = 1u << q;
    const double eps = ctx.params.epsilon;
    const double* z = ctx.ds.z().data();

    double aug[(kMaxSparsity + 1) * (kMaxSparsity + 2)];
    double sol[kMaxSparsity + 1];

    // Cofactors of the rule columns replaced by z, shared across sign
    // patterns; they give the candidate rule by Cramer for the grid filter.
    double CA[2][3];
    const bool have_cramer = grid != nullptr && (s == 1 || s == 2);
    if (have_cramer) {
        if (s == 1) {
            CA[0][0] = -z[ids[1]];
            CA[0][1] = z[ids[0]];
        } else {
            const double z1 = z[ids[0]], z2 = z[ids[1]], z3 = z[ids[2]];
            const double y10 = proj[0][ids[0]], y20 = proj[0][ids[1]], y30 = proj[0][ids[2]];
            const double y11 = proj[1][ids[0]], y21 = proj[1][ids[1]], y31 = proj[1][ids[2]];
            CA[0][0] = z2 * y31 - y21 * z3;
            CA[0][1] = -(z1 * y31 - y11 * z3);
            CA[0][2] = z1 * y21 - y11 * z2;
            CA[1][0] = y20 * z3 - z2 * y30;
            CA[1][1] = -(y10 * z3 - z1 * y30);
            CA[1][2] = y10 * z2 - z1 * y20;
        }
    }

    for (std::uint32_t sr = 0; sr < nsigns; ++sr) {
        const std::uint64_t key = pack_key(sr, tuple_rank);
        if (key >= st.best_packed.load(std::memory_order_relaxed)) break;

        double denom = 0.0;
        for (std::size_t l = 0; l < q; ++l) {
            const bool plus = (sr >> (s - l)) & 1u;
            denom += plus ? A[l] : -A[l];
        }
        if (denom == 0.0) continue;
        const double eps_c = -det_z / denom;
        const double wtol = 1e-9 + 1e-6 * (eps + std::abs(eps_c));
        if (eps_c < -wtol || eps_c > eps + wtol) continue;

        if (have_cramer) {
            const double det_m = -denom;
            double ac[2] = {0.0, 0.0};
            for (std::size_t i = 0; i < s; ++i) {
                double det_i = 0.0;
                for (std::size_t l = 0; l < q; ++l) {
                    const bool plus = (sr >> (s - l)) & 1u;
                    det_i += plus ? -CA[i][l] : CA[i][l];
                }
                ac[i] = det_i / det_m;
            }
            if (grid->rejects(ac)) continue;
        }

        // authoritative solve with the pivot-tolerance semantics
        double scale = 0.0;
        for (std::size_t l = 0; l < q; ++l) {
            const bool plus = (sr >> (s - l)) & 1u;
            for (std::size_t c = 0; c < s; ++c) {
                double v = proj[c][ids[l]];
                aug[l * (q + 1) + c] = v;
                scale = std::max(scale, std::abs(v));
            }
            aug[l * (q + 1) + s] = plus ? -1.0 : 1.0;
            aug[l * (q + 1) + q] = z[ids[l]];
        }
        if (solve_extremal_inplace(aug, q, scale, sol) != SolveStatus::ok) continue;
        if (sol[s] > eps) continue;

        auto scan = eliminate_scan(ctx, proj, sol, ws);
        if (!scan) continue;
        if (!(static_cast<double>(scan->second) > ctx.threshold)) continue;

        std::lock_guard<std::mutex> g(st.mu);
        if (key < st.best_key) {
            st.best_key = key;
            st.payload.surviving = std::move(scan->first);
            st.payload.a.assign(sol, sol + s);
            st.payload.eps_prime = sol[s];
            st.payload.coverage = scan->second;
            st.payload.ids.assign(ids, ids + q);
            st.payload.sign_rank = sr;
            st.payload.tuple_rank = tuple_rank;
            st.best_packed.store(key, std::memory_order_relaxed);
        }
    }
}

// Necessary condition for any sign pattern to yield 0 <= eps' <= eps:
// |det_z| <= eps * sum|A|, with slack for round-off on both sides.
bool precheck_pass(double det_z, double sumA, double sumZA, double eps) {
    const double guard = 1.1e-13 * sumZA;
    return std::abs(det_z) <= (eps + kResidualTol) * (1.0 + 1e-6) * sumA + guard;
}

// Scans tuple ranks [t0, t1) in lex order. Exhaustive mode walks the
// combination odometer; subsample mode unranks each allowed tuple.
void scan_block(const ScanContext& ctx, const double* const* proj, std::uint64_t t0,
                std::uint64_t t1, const std::vector<std::uint64_t>* allowed,
                const CandidateGrid* grid, DimsScanState& st, ScanWorkspace& ws) {
    const std::size_t s = ctx.s, q = ctx.q, m = ctx.m;
    const double* z = ctx.ds.z().data();
    const double eps = ctx.params.epsilon;
    double A[kMaxSparsity + 1];

    if (s == 2 && allowed == nullptr) {
        // Hot path: j3-inner loop with cached pair data.
        std::vector<std::size_t> combo = unrank_combination(m, 3, t0);
        const double* p0 = proj[0];
        const double* p1 = proj[1];
        std::uint64_t rank = t0;
        std::size_t c0 = combo[0], c1 = combo[1], c2 = combo[2];
        while (rank < t1) {
            const double y10 = p0[c0], y11 = p1[c0], z1 = z[c0];
            const double y20 = p0[c1], y21 = p1[c1], z2 = z[c1];
            const double a3 = y10 * y21 - y11 * y20;
            const double abs_a3 = std::abs(a3);
            const double az12 = std::abs(z1) + std::abs(z2);
            for (; c2 < m && rank < t1; ++c2, ++rank) {
                const double y30 = p0[c2], y31 = p1[c2], z3 = z[c2];
                const double a1 = y20 * y31 - y21 * y30;
                const double a2 = -(y10 * y31 - y11 * y30);
                const double det_z = z1 * a1 + z2 * a2 + z3 * a3;
                const double sumA = std::abs(a1) + std::abs(a2) + abs_a3;
                if (!precheck_pass(det_z, sumA, 1.0 * (az12 + std::abs(z3)) * sumA, eps))
                    continue;
                A[0] = a1;
                A[1] = a2;
                A[2] = a3;
                const std::size_t ids[3] = {c0, c1, c2};
                evaluate_tuple(ctx, proj, ids, rank, A, det_z, grid, st, ws);
            }
            if (rank >= t1) break;
            // odometer step over (c0, c1)
            if (c1 + 1 <= m - 2) {
                ++c1;
            } else {
                ++c0;
                c1 = c0 + 1;
            }
            c2 = c1 + 1;
        }
        return;
    }

    std::vector<std::size_t> combo;
    if (allowed == nullptr) combo = unrank_combination(m, q, t0);
    for (std::uint64_t rank = t0; rank < t1; ++rank) {
        if (allowed != nullptr) combo = unrank_combination(m, q, (*allowed)[rank]);
        column_cofactors(proj, combo.data(), s, A);
        double det_z = 0.0, sumA = 0.0, sumZA = 0.0;
        for (std::size_t l = 0; l < q; ++l) {
            det_z += z[combo[l]] * A[l];
            sumA += std::abs(A[l]);
            sumZA += std::abs(z[combo[l]]) * std::abs(A[l]);
        }
        if (precheck_pass(det_z, sumA, sumZA, eps))
            evaluate_tuple(ctx, proj, combo.data(), rank, A, det_z, grid, st, ws);
        if (allowed == nullptr && rank + 1 < t1) next_combination(combo, m);
    }
}

} // namespace

std::optional<InnerCandidate> inner_candidate_eval(const Dataset& dataset,
                                                   const TaskParams& params,
                                                   const CandidateBasis& basis) {
    params.validate();
    basis.validate(dataset.feature_count(), dataset.size(), params.sparsity);

    const std::size_t s = params.sparsity, q = s + 1;
    std::vector<std::vector<double>> rows(q, std::vector<double>(s));
    std::vector<double> targets(q);
    for (std::size_t l = 0; l < q; ++l) {
        for (std::size_t c = 0; c < s; ++c)
            rows[l][c] = dataset.y_at(basis.example_ids[l], basis.dims[c]);
        targets[l] = dataset.z()[basis.example_ids[l]];
    }
    auto solved = solve_extremal_system(rows, targets, basis.signs);
    if (solved.status != SolveStatus::ok) return std::nullopt;
    if (solved.fit.eps_prime > params.epsilon) return std::nullopt;

    auto [condition, coverage] = condition_from_rule(
        dataset, basis.dims, solved.fit.a, params.epsilon, params.k);
    InnerCandidate out{std::move(condition),
                       SparseLinearRule{basis.dims, std::move(solved.fit.a)}, coverage};
    return out;
}

std::pair<KDnf, std::size_t> condition_from_rule(const Dataset& dataset,
                                                 std::span<const std::size_t> dims,
                                                 std::span<const double> coeffs,
                                                 double epsilon, std::size_t k) {
    if (dims.size() != coeffs.size())
        throw std::invalid_argument("dims/coeffs length mismatch");
    const std::size_t m = dataset.size();
    KDnf trivial = trivial_kdnf(dataset.attr_count(), k);
    TermMatcher matcher(trivial, dataset);

    BitVec violators(m);
    const double eps_tol = epsilon + kResidualTol;
    for (std::size_t j = 0; j < m; ++j) {
        double pred = 0.0;
        for (std::size_t i = 0; i < dims.size(); ++i)
            pred += coeffs[i] * dataset.y_at(j, dims[i]);
        if (std::abs(pred - dataset.z()[j]) > eps_tol) violators.set(j);
    }

    std::vector<Term> kept;
    BitVec covered(m);
    for (std::size_t t = 0; t < matcher.term_count(); ++t) {
        if (matcher.mask(t).intersects(violators)) continue;
        kept.push_back(trivial.terms()[t]);
        covered |= matcher.mask(t);
    }
    return {KDnf(dataset.attr_count(), std::move(kept)), covered.count()};
}

std::optional<FitReport> find_and_eliminate(const Dataset& dataset,
                                            const TaskParams& params,
                                            const FitOptions& options) {
    params.validate();
    dataset.validate();
    if (dataset.size() == 0) throw std::invalid_argument("dataset is empty");
    if (params.sparsity > dataset.feature_count())
        throw std::invalid_argument("sparsity exceeds feature count");
    if (params.k > dataset.attr_count())
        throw std::invalid_argument("k exceeds attribute count");
    if (params.sparsity > kMaxSparsity)
        throw std::domain_error("sparsity beyond desk-scale range");

    const std::size_t m = dataset.size(), s = params.sparsity, q = s + 1;
    if (m < q) return std::nullopt; // no basis can exist

    ScanContext ctx(dataset, params);

    std::uint64_t total_tuples = combination_count(m, q);
    if (total_tuples >= kMaxTuples)
        throw std::domain_error("example-tuple space beyond desk-scale range");

    // Optional heuristic cap on the example-tuple space.
    std::vector<std::uint64_t> allowed;
    bool subsampled = false;
    if (options.max_bases > 0 && total_tuples > options.max_bases) {
        subsampled = true;
        SplitRng rng(options.subsample_seed);
        allowed.reserve(options.max_bases);
        for (std::uint64_t i = 0; i < options.max_bases; ++i)
            allowed.push_back(rng.next_u64() % total_tuples);
        std::sort(allowed.begin(), allowed.end());
        allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
    }
    const std::uint64_t scan_total = subsampled ? allowed.size() : total_tuples;
    const std::vector<std::uint64_t>* allowed_ptr = subsampled ? &allowed : nullptr;

    const unsigned threads = std::max(1u, options.threads);
    const std::uint64_t block = 16384;
    const std::uint64_t nblocks = (scan_total + block - 1) / block;

    std::vector<std::size_t> dims(s);
    for (std::size_t i = 0; i < s; ++i) dims[i] = i;
    std::uint64_t dims_rank = 0;

    while (true) {
        std::vector<const double*> proj(s);
        for (std::size_t i = 0; i < s; ++i) proj[i] = dataset.y_col(dims[i]).data();

        // The rejection grid pays for itself only on large tuple spaces.
        std::optional<CandidateGrid> grid;
        if ((s == 1 || s == 2) && scan_total >= 200000)
            grid = build_candidate_grid(ctx, proj.data());
        const CandidateGrid* grid_ptr = grid ? &*grid : nullptr;

        DimsScanState st;
        auto worker = [&]() {
            ScanWorkspace ws;
            while (true) {
                std::uint64_t b = st.next_block.fetch_add(1, std::memory_order_relaxed);
                if (b >= nblocks) break;
                const std::uint64_t t0 = b * block;
                const std::uint64_t t1 = std::min<std::uint64_t>(scan_total, t0 + block);
                const std::uint64_t bp = st.best_packed.load(std::memory_order_relaxed);
                if (bp != UINT64_MAX && (bp >> 56) == 0 && t0 > (bp & (kMaxTuples - 1)))
                    continue; // nothing in this block can beat the current best
                scan_block(ctx, proj.data(), t0, t1, allowed_ptr, grid_ptr, st, ws);
            }
        };

        if (threads == 1 || nblocks <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
            worker();
            for (auto& th : pool) th.join();
        }

        if (st.best_key != UINT64_MAX) {
            const CandidatePayload& p = st.payload;
            FitReport rep;
            rep.model.n = dataset.attr_count();
            rep.model.d = dataset.feature_count();
            rep.model.k = params.k;
            rep.model.epsilon = params.epsilon;
            rep.model.algorithm = AlgorithmKind::sup_norm;
            std::vector<Term> kept;
            kept.reserve(p.surviving.size());
            for (auto id : p.surviving) kept.push_back(ctx.trivial.terms()[id]);
            rep.model.condition = KDnf(dataset.attr_count(), std::move(kept));
            rep.model.rule = SparseLinearRule{dims, p.a};

            rep.basis.dims = dims;
            rep.basis.signs.resize(q);
            for (std::size_t l = 0; l < q; ++l)
                rep.basis.signs[l] = ((p.sign_rank >> (s - l)) & 1u) ? 1 : -1;
            rep.basis.example_ids = subsampled
                ? unrank_combination(m, q, allowed[p.tuple_rank])
                : unrank_combination(m, q, p.tuple_rank);

            rep.train_coverage = p.coverage;
            if (!(static_cast<double>(rep.train_coverage) > ctx.threshold))
                throw std::logic_error("accepted candidate below coverage threshold");

            unsigned __int128 idx =
                (static_cast<unsigned __int128>(dims_rank) * (1u << q) + p.sign_rank) *
                    scan_total +
                p.tuple_rank;
            rep.bases_examined = idx + 1 > static_cast<unsigned __int128>(UINT64_MAX)
                                     ? UINT64_MAX
                                     : static_cast<std::uint64_t>(idx + 1);
            return rep;
        }

        if (!next_combination(dims, dataset.feature_count())) break;
        ++dims_rank;
    }
    return std::nullopt;
}

} // namespace condreg
