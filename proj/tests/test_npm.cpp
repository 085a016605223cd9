#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <npm/benchmark.hpp>
#include <npm/errors.hpp>
#include <npm/general_eig.hpp>
#include <npm/iteration.hpp>
#include <npm/qr.hpp>
#include <npm/rng.hpp>
#include <npm/sym_eig.hpp>

using namespace npm;

namespace {

Matrix random_orthogonal(Index n, uint64_t seed) {
    Rng rng(seed);
    return qr_thin(rng.gaussian_matrix(n, n)).q.matrix();
}

}  // namespace

TEST_CASE("benchmark eigenvectors satisfy their eigen equations") {
    for (double alpha : {0.0, 0.2, 0.5, 0.9}) {
        const Matrix a = a_alpha(alpha);
        CHECK((a * psi1() - psi1()).norm() < 1e-14);
        CHECK((a * psi2(alpha) + psi2(alpha)).norm() < 1e-14);
        CHECK((a * psi3(alpha) - alpha * psi3(alpha)).norm() < 1e-14);
        CHECK(psi1().norm() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(psi2(alpha).norm() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(psi3(alpha).norm() == doctest::Approx(1.0).epsilon(1e-15));

        // Cross-check against the dense solver: same eigenvalues, and the
        // closed-form vectors lie in the matching eigenspaces.
        Spectrum s = general_eig(a);
        CHECK(s.values(0).real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.values(1).real() == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(s.values(2).real() == doctest::Approx(alpha).epsilon(1e-12));
        CHECK((s.vectors.col(0).real() * s.vectors.col(0).real().transpose() * psi1() - psi1())
                  .norm() < 1e-10);
        CHECK((s.vectors.col(1).real() * s.vectors.col(1).real().transpose() * psi2(alpha) -
               psi2(alpha))
                  .norm() < 1e-10);
    }
}

TEST_CASE("dominant_projector projects onto span{psi1, psi2}") {
    for (double alpha : {0.0, 0.5}) {
        SubspaceProjector p = dominant_projector(alpha);
        CHECK(p.rank() == 2);
        CHECK((p.matrix() * psi1() - psi1()).norm() < 1e-12);
        CHECK((p.matrix() * psi2(alpha) - psi2(alpha)).norm() < 1e-12);
        // psi3 is not inside the plane.
        CHECK((p.matrix() * psi3(alpha) - psi3(alpha)).norm() > 0.1);
    }
}

TEST_CASE("SubspaceProjector validates its invariants") {
    CHECK_NOTHROW(SubspaceProjector(Matrix::Identity(3, 3), 3));
    Matrix p = Matrix::Zero(3, 3);
    p(0, 0) = 1.0;
    CHECK_NOTHROW(SubspaceProjector(p, 1));
    CHECK_THROWS_AS(SubspaceProjector(p, 2), ShapeError);  // trace mismatch

    Matrix asym = p;
    asym(0, 1) = 1e-6;
    CHECK_THROWS_AS(SubspaceProjector(asym, 1), NotSymmetric);

    Matrix notproj = Matrix::Identity(3, 3) * 0.5;
    CHECK_THROWS_AS(SubspaceProjector(notproj, 1), ShapeError);

    StiefelFrame u = random_stiefel(5, 2, 9);
    SubspaceProjector q = SubspaceProjector::from_frame(u);
    CHECK(q.rank() == 2);
    CHECK((q.matrix() * u.matrix() - u.matrix()).norm() < 1e-12);
}

TEST_CASE("npm_step identity and hand-evaluated case") {
    StiefelFrame u = random_stiefel(4, 2, 3);
    StiefelFrame out = npm_step(Matrix::Identity(4, 4), u);
    CHECK((out.matrix() - u.matrix()).norm() < 1e-13);

    // A = diag(2,1), u = (1,1)/sqrt(2): Z = 2.5, output (2,1)/sqrt(5).
    Matrix a = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    Vector u0(2);
    u0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    StiefelFrame res = npm_step(a, StiefelFrame(u0));
    CHECK(res.matrix()(0, 0) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-14));
    CHECK(res.matrix()(1, 0) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("npm_step converges in one step when the third eigenvalue is zero") {
    const Matrix a = a_alpha(0.0);
    StiefelFrame u1 = npm_step(a, start_frame_r2(0.0));
    CHECK(subspace_distance(u1, dominant_projector(0.0)) <= 1e-10);
}

TEST_CASE("npm_step flags rank collapse") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    StiefelFrame u(Matrix(Eigen::Vector2d(0.0, 1.0)));
    CHECK_THROWS_AS(npm_step(a, u), NearSingular);
    CHECK_THROWS_AS(npm_step(Matrix::Identity(3, 3), u), ShapeError);
}

TEST_CASE("npm steps stay on the Stiefel manifold") {
    for (uint64_t seed : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u, 9u, 10u}) {
        Rng rng(seed);
        const Index n = 2 + static_cast<Index>(seed % 7);
        const Index r = 1 + static_cast<Index>(seed % static_cast<uint64_t>(n));
        Matrix a = rng.gaussian_matrix(n, n);
        StiefelFrame u = random_stiefel(n, r, seed + 1000);
        for (int k = 0; k < 5; ++k) {
            u = npm_step(a, u);
            CHECK(u.orthonormality_defect() <= 1e-10);
        }
    }
}

TEST_CASE("stationary step fixes invariant frames and matches plain projectors") {
    const Matrix a = a_alpha(0.5);

    // Invariant 2-frame.
    Matrix x(3, 2);
    x << psi1(), psi2(0.5);
    StiefelFrame inv2 = StiefelFrame::orthonormalized(x);
    StiefelFrame s2 = npm_stationary_step(a, inv2);
    CHECK((s2.matrix() - inv2.matrix()).norm() <= 1e-9);
    // The plain step moves the frame but not the projector.
    StiefelFrame p2 = npm_step(a, inv2);
    CHECK((p2.matrix() - inv2.matrix()).norm() > 1e-3);
    CHECK((p2.matrix() * p2.matrix().transpose() -
           inv2.matrix() * inv2.matrix().transpose())
              .norm() < 1e-12);

    // Single eigenvectors, including the negative eigenvalue.
    for (const Vector& v : {psi1(), psi2(0.5), psi3(0.5)}) {
        StiefelFrame f((Matrix(v)));
        StiefelFrame sf = npm_stationary_step(a, f);
        CHECK((sf.matrix() - f.matrix()).norm() <= 1e-9);
    }

    // Identity is fixed for any frame.
    StiefelFrame u = random_stiefel(4, 2, 17);
    StiefelFrame id = npm_stationary_step(Matrix::Identity(4, 4), u);
    CHECK((id.matrix() - u.matrix()).norm() < 1e-12);
}

TEST_CASE("plain and stationary steps share the projector on random pairs") {
    for (uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed + 500);
        const Index n = 2 + static_cast<Index>(seed % 7);
        const Index r = 1 + static_cast<Index>(seed % static_cast<uint64_t>(n));
        Matrix a = rng.gaussian_matrix(n, n);
        StiefelFrame u = random_stiefel(n, r, seed + 900);
        StiefelFrame plain = npm_step(a, u);
        StiefelFrame stat = npm_stationary_step(a, u);
        const Matrix dp = plain.matrix() * plain.matrix().transpose() -
                          stat.matrix() * stat.matrix().transpose();
        CHECK(dp.norm() <= 1e-12);
        CHECK(stat.orthonormality_defect() <= 1e-10);
    }
}

TEST_CASE("npm_run converges at the spectral-gap rate") {
    NpmConfig cfg;

    // Triangular family: ratio |lambda_3| / |lambda_2| = alpha.
    for (double alpha : {0.2, 0.5}) {
        NpmRunReport rep = npm_run(a_alpha(alpha), start_frame_r2(alpha), cfg,
                                   NpmVariant::Plain, dominant_projector(alpha));
        CHECK(rep.converged);
        CHECK(rep.projector_delta_history.size() == static_cast<size_t>(rep.iterations));
        CHECK(rep.distance_history.size() == static_cast<size_t>(rep.iterations));
        const double rate = geometric_rate(rep.distance_history);
        CHECK(std::abs(rate - alpha) <= 0.15 * alpha);
    }

    // Symmetric case: rate lambda_{r+1} / lambda_r.
    Matrix d = Eigen::Vector3d(3.0, 2.0, 1.0).asDiagonal();
    Matrix pref = Matrix::Zero(3, 3);
    pref(0, 0) = pref(1, 1) = 1.0;
    NpmRunReport rep = npm_run(d, random_stiefel(3, 2, 77), cfg, NpmVariant::Plain,
                               SubspaceProjector(pref, 2));
    CHECK(rep.converged);
    CHECK(geometric_rate(rep.distance_history) == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("npm_run on the identity stops immediately") {
    StiefelFrame u = random_stiefel(4, 2, 21);
    NpmRunReport rep = npm_run(Matrix::Identity(4, 4), u, NpmConfig{},
                               NpmVariant::Plain, SubspaceProjector::from_frame(u));
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.distance_history.size() == 1);
    CHECK(rep.distance_history[0] < 1e-12);
}

TEST_CASE("npm_run validates config and reports the failing iteration") {
    StiefelFrame u = random_stiefel(3, 1, 2);
    NpmConfig bad;
    bad.max_iter = 0;
    CHECK_THROWS_AS(npm_run(Matrix::Identity(3, 3), u, bad), ShapeError);

    // Nilpotent matrix kills the span once e3 has been walked down to e1.
    Matrix nil = Matrix::Zero(3, 3);
    nil(0, 1) = 1.0;
    nil(1, 2) = 1.0;
    StiefelFrame e3((Matrix(Vector::Unit(3, 2))));
    try {
        npm_run(nil, e3, NpmConfig{});
        FAIL("expected NearSingular");
    } catch (const NearSingular& e) {
        CHECK(std::string(e.what()).find("iteration 3") != std::string::npos);
    }
}

TEST_CASE("stationary variant run reaches the same subspace") {
    NpmRunReport rep = npm_run(a_alpha(0.5), start_frame_r2(0.5), NpmConfig{},
                               NpmVariant::Stationary, dominant_projector(0.5));
    CHECK(rep.converged);
    CHECK(rep.distance_history.back() < 1e-9);
}

TEST_CASE("reduced run: identity fixes, tied moduli oscillate") {
    StiefelFrame u0((Matrix(Eigen::Vector2d(0.8, 0.6))));

    NpmRunReport fixed = reduced_npm_run(Matrix::Identity(2, 2), u0);
    CHECK(fixed.converged);
    CHECK((fixed.final_frame.matrix() - u0.matrix()).norm() < 1e-13);

    // diag(1,-1) has tied moduli: the frame flips sign in the second
    // coordinate every step, so the projector cycles with period two and the
    // run must not report convergence.
    NpmConfig cfg;
    cfg.max_iter = 40;
    Matrix d = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    NpmRunReport osc = reduced_npm_run(d, u0, cfg);
    CHECK_FALSE(osc.converged);
    CHECK(osc.iterations == 40);
    CHECK(osc.projector_delta_history.front() ==
          doctest::Approx(osc.projector_delta_history.back()).epsilon(1e-12));
    CHECK(osc.projector_delta_history.back() > 0.1);

    CHECK_THROWS_AS(reduced_npm_run(d, StiefelFrame(Matrix::Identity(2, 2))), ShapeError);
}

TEST_CASE("reduced run composes into the dominant m-subspace") {
    // Host with genuine gaps at r = 2 and m = 1.
    Matrix host = Eigen::Vector4d(2.0, 1.2, 0.5, 0.1).asDiagonal();
    NpmRunReport outer = npm_run(host, random_stiefel(4, 2, 11));
    CHECK(outer.converged);

    Matrix a_proj = projected_matrix(host, outer.final_frame);
    NpmRunReport inner = reduced_npm_run(a_proj, random_stiefel(2, 1, 12));
    CHECK(inner.converged);

    StiefelFrame composed(outer.final_frame.matrix() * inner.final_frame.matrix());
    Matrix pe1 = Matrix::Zero(4, 4);
    pe1(0, 0) = 1.0;
    CHECK(subspace_distance(composed, SubspaceProjector(pe1, 1)) < 1e-6);
}

TEST_CASE("reduced run on the tied family stays inside the dominant plane") {
    const double alpha = 0.5;
    NpmRunReport outer = npm_run(a_alpha(alpha), start_frame_r2(alpha));
    CHECK(outer.converged);

    Matrix a_proj = projected_matrix(a_alpha(alpha), outer.final_frame);
    NpmConfig cfg;
    cfg.max_iter = 100;
    NpmRunReport inner = reduced_npm_run(a_proj, random_stiefel(2, 1, 13), cfg);
    StiefelFrame composed(outer.final_frame.matrix() * inner.final_frame.matrix());
    CHECK(partial_overlap_distance(composed, dominant_projector(alpha)) < 1e-6);
}

TEST_CASE("subspace distances hit their extremes") {
    StiefelFrame u = random_stiefel(5, 2, 31);
    CHECK(subspace_distance(u, SubspaceProjector::from_frame(u)) < 1e-12);

    Matrix i5 = Matrix::Identity(5, 5);
    StiefelFrame a(Matrix(i5.leftCols(2)));
    StiefelFrame b(Matrix(i5.rightCols(2)));
    CHECK(subspace_distance(a, SubspaceProjector::from_frame(b)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Containment metric: a vector inside the plane scores 0 even though the
    // ranks differ.
    StiefelFrame p1((Matrix(psi1())));
    CHECK(partial_overlap_distance(p1, dominant_projector(0.5)) < 1e-12);
    Eigen::Vector3d perp = Eigen::Vector3d(psi1()).cross(Eigen::Vector3d(psi2(0.5)));
    perp.normalize();
    StiefelFrame pperp((Matrix(perp)));
    CHECK(partial_overlap_distance(pperp, dominant_projector(0.5)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projected matrix keeps dominant eigenvalues at convergence") {
    NpmRunReport rep = npm_run(a_alpha(0.5), start_frame_r2(0.5));
    Matrix au = projected_matrix(a_alpha(0.5), rep.final_frame);
    Spectrum s = general_eig(au);
    CHECK(s.values(0).real() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.values(1).real() == doctest::Approx(-1.0).epsilon(1e-8));

    StiefelFrame full(Matrix::Identity(3, 3));
    CHECK((projected_matrix(a_alpha(0.2), full) - a_alpha(0.2)).norm() == 0.0);
}

TEST_CASE("oja residual vanishes on invariant spans and shrinks along runs") {
    Matrix x(3, 2);
    x << psi1(), psi2(0.9);
    CHECK(oja_residual(a_alpha(0.9), StiefelFrame::orthonormalized(x)) < 1e-9);
    CHECK(oja_residual(Matrix::Identity(4, 4), random_stiefel(4, 2, 41)) < 1e-14);

    StiefelFrame u = start_frame_r2(0.9);
    double at10 = 0.0;
    for (int k = 1; k <= 100; ++k) {
        u = npm_step(a_alpha(0.9), u);
        if (k == 10) at10 = oja_residual(a_alpha(0.9), u);
    }
    CHECK(oja_residual(a_alpha(0.9), u) < at10);
}

TEST_CASE("domain rank check recognizes attraction-domain membership") {
    for (double alpha : {0.0, 0.2, 0.5, 0.9}) {
        CHECK(domain_rank_check(a_alpha(alpha), start_frame_r2(alpha), 2).member);
        CHECK(domain_rank_check(a_alpha(alpha), start_frame_r1(alpha), 2).member);
        CHECK(domain_rank_check(a_alpha(alpha), start_frame_r1_weak(alpha), 2).member);
    }

    // psi3 has no component in the dominant pair: top 2x1 block is zero.
    DomainRankCheck out =
        domain_rank_check(a_alpha(0.5), StiefelFrame((Matrix(psi3(0.5)))), 2);
    CHECK_FALSE(out.member);
    CHECK(out.sigma_min < 1e-10);

    // First-m eigenvector columns are trivially members.
    Matrix x(3, 2);
    x << psi1(), psi2(0.5);
    CHECK(domain_rank_check(a_alpha(0.5), StiefelFrame::orthonormalized(x), 2).member);
}

TEST_CASE("iterates are invariant under positive scaling of the matrix") {
    Rng rng(61);
    Matrix a = rng.gaussian_matrix(4, 4);
    StiefelFrame u1 = random_stiefel(4, 2, 62);
    StiefelFrame u2 = u1;
    for (int k = 0; k < 10; ++k) {
        u1 = npm_step(a, u1);
        u2 = npm_step(Matrix(3.7 * a), u2);
        CHECK((u1.matrix() - u2.matrix()).norm() <= 1e-12);
    }
}

TEST_CASE("iterates are equivariant under orthogonal similarity") {
    Rng rng(71);
    Matrix a = rng.gaussian_matrix(5, 5);
    Matrix q = random_orthogonal(5, 72);
    Matrix b = q.transpose() * a * q;
    StiefelFrame u = random_stiefel(5, 2, 73);
    StiefelFrame v(Matrix(q.transpose() * u.matrix()));
    for (int k = 0; k < 20; ++k) {
        u = npm_step(a, u);
        v = npm_step(b, v);
        CHECK((v.matrix() - q.transpose() * u.matrix()).norm() <= 1e-9);
    }
}

TEST_CASE("geometric_rate fits windows and rejects empty ones") {
    std::vector<double> h;
    for (int k = 0; k < 40; ++k) h.push_back(std::pow(0.3, k));
    CHECK(geometric_rate(h) == doctest::Approx(0.3).epsilon(1e-12));

    std::vector<double> flat{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(geometric_rate(flat), ShapeError);

    // Only in-window pairs participate in the fit.
    std::vector<double> mixed{0.5, 1e-3, 5e-4, 2.5e-4, 1e-12};
    CHECK(geometric_rate(mixed) == doctest::Approx(0.5).epsilon(1e-12));
}
