#include "fracstab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace fracstab::linalg {

namespace {

using C = std::complex<double>;

Eigen::MatrixXd to_eigen(const DenseMatrix& A) {
    Eigen::MatrixXd M(A.n, A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) M(i, j) = A(i, j);
    return M;
}

DenseMatrix from_eigen(const Eigen::MatrixXd& M) {
    DenseMatrix A((int)M.rows());
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) A(i, j) = M(i, j);
    return A;
}

void check_finite(const DenseMatrix& A, const char* who) {
    for (double v : A.a)
        if (!std::isfinite(v)) throw DomainError(std::string(who) + ": entries must be finite");
    if (A.n < 1) throw DomainError(std::string(who) + ": dimension must be >= 1");
    if ((std::size_t)A.n * A.n != A.a.size())
        throw DomainError(std::string(who) + ": entry count does not match dimension");
}

// Parlett-Reinsch balancing with power-of-two scale factors (exact in
// floating point).  Returns D with B = D^{-1} A D balanced; eigenvectors of A
// are D * (eigenvectors of B).
Eigen::VectorXd balance(Eigen::MatrixXd& A) {
    const int n = (int)A.rows();
    Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
    bool converged = false;
    while (!converged) {
        converged = true;
        for (int i = 0; i < n; ++i) {
            double r = 0, c = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::fabs(A(j, i));
                r += std::fabs(A(i, j));
            }
            if (c == 0 || r == 0) continue;
            double f = 1.0;
            const double s = c + r;
            while (c < r / 2.0) {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while (c >= r * 2.0) {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if ((c + r) < 0.95 * s && f != 1.0) {
                converged = false;
                d(i) *= f;
                A.col(i) *= f;
                A.row(i) /= f;
            }
        }
    }
    return d;
}

double cond2(const Eigen::MatrixXcd& V) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

// stable sort of eigenpairs by descending real part, then ascending |Im|,
// then Im >= 0 first: deterministic output order for report serialization
void sort_pairs(std::vector<C>& vals, Eigen::MatrixXcd& vecs) {
    const int n = (int)vals.size();
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int p, int q) {
        if (vals[p].real() != vals[q].real()) return vals[p].real() > vals[q].real();
        const double ap = std::fabs(vals[p].imag()), aq = std::fabs(vals[q].imag());
        if (ap != aq) return ap < aq;
        return vals[p].imag() > vals[q].imag();
    });
    std::vector<C> sv(n);
    Eigen::MatrixXcd sV(n, n);
    for (int k = 0; k < n; ++k) {
        sv[k] = vals[idx[k]];
        sV.col(k) = vecs.col(idx[k]);
    }
    vals = std::move(sv);
    vecs = std::move(sV);
}

Spectrum pack(std::vector<C> vals, Eigen::MatrixXcd vecs) {
    sort_pairs(vals, vecs);
    Spectrum s;
    s.n = (int)vals.size();
    s.eigenvalues = std::move(vals);
    s.condition_flag =
        cond2(vecs) > 1e8 ? ConditionFlag::NearDefective : ConditionFlag::Diagonalizable;
    s.eigenvectors.resize((std::size_t)s.n * s.n);
    for (int j = 0; j < s.n; ++j)
        for (int i = 0; i < s.n; ++i) s.eigenvectors[(std::size_t)j * s.n + i] = vecs(i, j);
    return s;
}

Spectrum eig2(const DenseMatrix& A) {
    const double a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
    const double tr = a + d;
    const double det = a * d - b * c;
    const C disc = std::sqrt(C(tr * tr - 4.0 * det, 0.0));
    // sign choice avoids cancellation in the larger root
    const C q = (tr >= 0.0) ? 0.5 * (C(tr, 0) + disc) : 0.5 * (C(tr, 0) - disc);
    C l1, l2;
    if (std::abs(q) > 0) {
        l1 = q;
        l2 = C(det, 0) / q;
    } else {
        l1 = l2 = C(0, 0); // tr = det = 0
    }

    Eigen::MatrixXcd V(2, 2);
    auto vec_for = [&](C lam, int col) {
        // rows of (A - lam I) are (a-lam, b) and (c, d-lam); the eigenvector
        // is orthogonal to the larger row
        const C r1[2] = {C(a, 0) - lam, C(b, 0)};
        const C r2[2] = {C(c, 0), C(d, 0) - lam};
        const double n1 = std::abs(r1[0]) + std::abs(r1[1]);
        const double n2 = std::abs(r2[0]) + std::abs(r2[1]);
        C v0, v1;
        if (n1 >= n2 && n1 > 0) {
            v0 = -r1[1];
            v1 = r1[0];
        } else if (n2 > 0) {
            v0 = -r2[1];
            v1 = r2[0];
        } else {
            v0 = (col == 0) ? 1.0 : 0.0; // A = lam I
            v1 = (col == 0) ? 0.0 : 1.0;
        }
        const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
        V(0, col) = v0 / nrm;
        V(1, col) = v1 / nrm;
    };
    vec_for(l1, 0);
    vec_for(l2, 1);
    return pack({l1, l2}, V);
}

} // namespace

DenseMatrix DenseMatrix::identity(int dim) {
    DenseMatrix I(dim);
    for (int i = 0; i < dim; ++i) I(i, i) = 1.0;
    return I;
}

Spectrum eig(const DenseMatrix& A) {
    check_finite(A, "eig");
    if (A.n == 1) {
        Eigen::MatrixXcd V(1, 1);
        V(0, 0) = 1.0;
        return pack({C(A(0, 0), 0.0)}, V);
    }
    if (A.n == 2) return eig2(A);

    Eigen::MatrixXd M = to_eigen(A);
    const Eigen::VectorXd d = balance(M);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
        throw NonConvergence("eig: QR iteration did not converge");

    std::vector<C> vals(A.n);
    for (int i = 0; i < A.n; ++i) vals[i] = es.eigenvalues()(i);
    Eigen::MatrixXcd V = es.eigenvectors();
    for (int i = 0; i < A.n; ++i) V.row(i) *= d(i); // undo balancing
    for (int j = 0; j < A.n; ++j) V.col(j).normalize();
    return pack(std::move(vals), std::move(V));
}

DenseMatrix expm(const DenseMatrix& A, double t) {
    check_finite(A, "expm");
    if (!std::isfinite(t)) throw DomainError("expm: t must be finite");
    const int n = A.n;
    Eigen::MatrixXd M = to_eigen(A) * t;
    if (!M.allFinite()) throw Overflow("expm: t*A leaves the representable range");

    // Higham's degree-13 Pade coefficients
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;
    const double nrm = M.cwiseAbs().rowwise().sum().maxCoeff(); // inf-norm
    int s = 0;
    if (nrm > theta13) s = std::max(0, (int)std::ceil(std::log2(nrm / theta13)));
    if (s > 1060) throw Overflow("expm: scaling exponent exceeds double range");
    M /= std::pow(2.0, s);

    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd M2 = M * M;
    const Eigen::MatrixXd M4 = M2 * M2;
    const Eigen::MatrixXd M6 = M4 * M2;
    const Eigen::MatrixXd U =
        M * (M6 * (b[13] * M6 + b[11] * M4 + b[9] * M2) + b[7] * M6 + b[5] * M4 + b[3] * M2 +
             b[1] * I);
    const Eigen::MatrixXd W =
        M6 * (b[12] * M6 + b[10] * M4 + b[8] * M2) + b[6] * M6 + b[4] * M4 + b[2] * M2 + b[0] * I;
    Eigen::MatrixXd R = (W - U).partialPivLu().solve(W + U);
    for (int k = 0; k < s; ++k) R = R * R;
    if (!R.allFinite()) throw Overflow("expm: result leaves the representable range");
    return from_eigen(R);
}

DenseMatrix apply_analytic(const DenseMatrix& A, const std::function<C(C)>& f) {
    check_finite(A, "apply_analytic");
    const Spectrum s = eig(A);
    if (s.condition_flag == ConditionFlag::NearDefective)
        throw DefectiveMatrix("apply_analytic: eigenvector basis too ill-conditioned");
    const int n = A.n;
    Eigen::MatrixXcd V(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) V(i, j) = s.vec(i, j);
    Eigen::VectorXcd fl(n);
    for (int i = 0; i < n; ++i) fl(i) = f(s.eigenvalues[i]);
    const Eigen::MatrixXcd F = V * fl.asDiagonal() * V.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
    DenseMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = F(i, j).real();
    return out;
}

double norm2(const DenseMatrix& A) {
    check_finite(A, "norm2");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(A));
    return svd.singularValues()(0);
}

double numerical_abscissa(const DenseMatrix& A) {
    check_finite(A, "numerical_abscissa");
    const Eigen::MatrixXd M = to_eigen(A);
    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

} // namespace fracstab::linalg
