#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dynrb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using ElemMat = Eigen::Matrix<double, 8, 8>;
using ElemVec = Eigen::Matrix<double, 8, 1>;

} // namespace dynrb
