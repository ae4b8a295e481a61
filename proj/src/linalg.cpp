#include "idapbc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace idapbc {

Mat psd_sqrt(const Mat& s) {
    const Mat sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
    Vec lambda = eig.eigenvalues();
    for (Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < -1e-10)
            throw NotPsdError("psd_sqrt: matrix has a negative eigenvalue", lambda(i));
        if (lambda(i) < 0.0) lambda(i) = 0.0;
    }
    return eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

Mat left_annihilator(const Mat& g) {
    const Index n = g.rows();
    const Index m = g.cols();
    Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU);
    if (m > 0) {
        const double smax = svd.singularValues()(0);
        if (smax <= 0.0 || svd.singularValues()(m - 1) < 1e-12 * smax)
            throw RankDeficiencyError("left_annihilator: input matrix is rank deficient");
    }
    // left singular vectors orthogonal to the column space
    return svd.matrixU().rightCols(n - m).transpose();
}

double min_eigenvalue(const Mat& s) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (s + s.transpose()),
                                           Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

bool is_spd(const Mat& s, double tol) { return min_eigenvalue(s) > tol; }

Index numerical_rank(const Mat& m, double rel_tol) {
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double thresh = rel_tol * sv(0);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;
    return rank;
}

}  // namespace idapbc
