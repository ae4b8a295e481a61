#include "idapbc/fields.hpp"
#include "idapbc/finite_diff.hpp"
#include "idapbc/sampling.hpp"

#include <doctest.h>

#include "support.hpp"

using namespace idapbc;

namespace {

MatrixField trig_field() {
    MatrixField f;
    f.rows = 2;
    f.cols = 2;
    f.value = [](const Vec& q) {
        Mat m(2, 2);
        m << 1.5 + std::sin(q(0)) * 0.3, 0.2 * q(1), 0.2 * q(1), 2.0 + 0.4 * std::cos(q(1));
        return m;
    };
    f.partial = [](const Vec& q, Index i) {
        Mat m = Mat::Zero(2, 2);
        if (i == 0) {
            m(0, 0) = 0.3 * std::cos(q(0));
        } else {
            m(0, 1) = m(1, 0) = 0.2;
            m(1, 1) = -0.4 * std::sin(q(1));
        }
        return m;
    };
    return f;
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("combinators keep analytic partials consistent with the oracle") {
    const MatrixField a = trig_field();
    const MatrixField b = testing::synthetic_md();
    const std::vector<NamedField> combos = {
        {"product", fields::multiply(a, b)},
        {"sum", fields::add(a, fields::scale(-0.7, b))},
        {"inverse", fields::inverse(b)},
        {"transpose_product", fields::transpose(fields::multiply(a, b))},
        {"stack", fields::vstack(a, fields::hstack(b, fields::constant(Mat::Zero(2, 0))))},
    };
    StateSampler sampler(testing::unit_box(2), 11);
    for (int i = 0; i < 25; ++i) {
        const Vec q = sampler.next_q();
        for (const auto& f : combos) {
            CAPTURE(f.name);
            CHECK(fd_check(f, q) < 1e-5);
        }
    }
}

TEST_CASE("inverse field sandwiches the partial") {
    const MatrixField b = testing::synthetic_md();
    const MatrixField binv = fields::inverse(b);
    Vec q(2);
    q << 0.4, -0.2;
    const Mat expected = -(b.value(q).inverse()) * b.partial(q, 1) * b.value(q).inverse();
    CHECK((binv.partial(q, 1) - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("lift places partials in the right slots") {
    MatrixField inner;
    inner.rows = 1;
    inner.cols = 1;
    inner.value = [](const Vec& u) { return Mat::Constant(1, 1, std::sin(u(0))); };
    inner.partial = [](const Vec& u, Index) { return Mat::Constant(1, 1, std::cos(u(0))); };
    const MatrixField full = fields::lift(inner, 1, 1, 3);
    Vec q(3);
    q << 9.0, 0.5, -3.0;  // only q(1) matters
    CHECK(full.value(q)(0, 0) == doctest::Approx(std::sin(0.5)));
    CHECK(full.partial(q, 0)(0, 0) == 0.0);
    CHECK(full.partial(q, 2)(0, 0) == 0.0);
    CHECK(full.partial(q, 1)(0, 0) == doctest::Approx(std::cos(0.5)));
}

TEST_CASE("scalar field lift and combination") {
    ScalarField inner;
    inner.value = [](const Vec& u) { return u(0) * u(0); };
    inner.gradient = [](const Vec& u) { return (2.0 * u).eval(); };
    const ScalarField full =
        fields::add(fields::lift(inner, 2, 1, 3), fields::constant_scalar(1.0));
    Vec q(3);
    q << 7.0, 8.0, 0.25;
    CHECK(full.value(q) == doctest::Approx(1.0625));
    const Vec g = full.gradient(q);
    CHECK(g(0) == 0.0);
    CHECK(g(1) == 0.0);
    CHECK(g(2) == doctest::Approx(0.5));
}

TEST_CASE("singular field inversion throws") {
    const MatrixField zero = fields::constant(Mat::Zero(2, 2));
    const MatrixField inv = fields::inverse(zero);
    CHECK_THROWS_AS((void)inv.value(Vec::Zero(2)), SingularMatrixError);
}

}  // TEST_SUITE
