#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "crmimo/rng.hpp"

namespace crmimo {

/// Finite joint pmf P_XY observed by the two terminals.
class JointSource {
public:
    JointSource(Eigen::MatrixXd pmf, std::vector<std::string> x_labels = {},
                std::vector<std::string> y_labels = {});

    const Eigen::MatrixXd& pmf() const { return pmf_; }
    int nx() const { return static_cast<int>(pmf_.rows()); }
    int ny() const { return static_cast<int>(pmf_.cols()); }
    const std::vector<std::string>& x_labels() const { return x_labels_; }
    const std::vector<std::string>& y_labels() const { return y_labels_; }

    Eigen::VectorXd marginal_x() const { return pmf_.rowwise().sum(); }
    Eigen::VectorXd marginal_y() const { return pmf_.colwise().sum().transpose(); }

    double entropy_x() const;      // H(X) bits
    double entropy_x_given_y() const;
    double mutual_information() const;  // I(X;Y)

    std::pair<int, int> sample(SplitRng& rng) const;

    /// Doubly symmetric binary source: X ~ Bern(1/2), Y = X xor Bern(p).
    static JointSource dsbs(double p);
    /// Independent uniform bits.
    static JointSource independent_bits();
    /// X = Y ~ Bern(1/2).
    static JointSource identical_bits();

private:
    Eigen::MatrixXd pmf_;
    std::vector<std::string> x_labels_, y_labels_;
    std::vector<double> cumulative_;  // row-major, for sampling
};

/// P_{U|X}: one probability row per X symbol over a U alphabet.
class TestChannel {
public:
    TestChannel(Eigen::MatrixXd rows);

    const Eigen::MatrixXd& rows() const { return rows_; }
    int nx() const { return static_cast<int>(rows_.rows()); }
    int u_card() const { return static_cast<int>(rows_.cols()); }

    static TestChannel identity(int nx, int u_card);
    static TestChannel uniform(int nx, int u_card);

private:
    Eigen::MatrixXd rows_;
};

double entropy_bits(const Eigen::VectorXd& pmf);

}  // namespace crmimo
