#ifndef SCHRODHOLTZ_TYPES_HPP
#define SCHRODHOLTZ_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace shz
{
    using cx = std::complex<double>;
    using CVec = Eigen::VectorXcd;
    using CMat = Eigen::MatrixXcd;
    using RVec = Eigen::VectorXd;
    using RMat = Eigen::MatrixXd;
    using SpMat = Eigen::SparseMatrix<std::complex<double>>;

    inline constexpr cx im{0.0, 1.0};

    // invalid user-facing configuration (CLI exit code 2)
    struct config_error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // a solver or estimator failed numerically (CLI exit code 3)
    struct numerical_error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };
} // namespace shz

#endif
