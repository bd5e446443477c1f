#include "crmimo/source.hpp"

#include <cmath>
#include <stdexcept>

namespace crmimo {

namespace {

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double entropy_bits(const Eigen::VectorXd& pmf) {
    double h = 0.0;
    for (int i = 0; i < pmf.size(); ++i) h -= xlog2x(pmf(i));
    return h;
}

JointSource::JointSource(Eigen::MatrixXd pmf, std::vector<std::string> x_labels,
                         std::vector<std::string> y_labels)
    : pmf_(std::move(pmf)), x_labels_(std::move(x_labels)), y_labels_(std::move(y_labels)) {
    if (pmf_.rows() < 1 || pmf_.cols() < 1) throw std::invalid_argument("JointSource: empty pmf");
    if (pmf_.minCoeff() < 0.0) throw std::invalid_argument("JointSource: negative entry");
    if (std::abs(pmf_.sum() - 1.0) > 1e-12) throw std::invalid_argument("JointSource: pmf must sum to 1");
    for (int r = 0; r < pmf_.rows(); ++r)
        if (pmf_.row(r).sum() <= 0.0) throw std::invalid_argument("JointSource: all-zero row");
    for (int c = 0; c < pmf_.cols(); ++c)
        if (pmf_.col(c).sum() <= 0.0) throw std::invalid_argument("JointSource: all-zero column");
    if (x_labels_.empty())
        for (int r = 0; r < pmf_.rows(); ++r) x_labels_.push_back("x" + std::to_string(r));
    if (y_labels_.empty())
        for (int c = 0; c < pmf_.cols(); ++c) y_labels_.push_back("y" + std::to_string(c));
    if (static_cast<int>(x_labels_.size()) != pmf_.rows() ||
        static_cast<int>(y_labels_.size()) != pmf_.cols())
        throw std::invalid_argument("JointSource: label count mismatch");
    cumulative_.reserve(static_cast<std::size_t>(pmf_.size()));
    double acc = 0.0;
    for (int r = 0; r < pmf_.rows(); ++r)
        for (int c = 0; c < pmf_.cols(); ++c) {
            acc += pmf_(r, c);
            cumulative_.push_back(acc);
        }
}

double JointSource::entropy_x() const { return entropy_bits(marginal_x()); }

double JointSource::entropy_x_given_y() const {
    const Eigen::VectorXd py = marginal_y();
    double h = 0.0;
    for (int c = 0; c < pmf_.cols(); ++c) {
        if (py(c) <= 0.0) continue;
        for (int r = 0; r < pmf_.rows(); ++r) h -= pmf_(r, c) > 0.0
                ? pmf_(r, c) * std::log2(pmf_(r, c) / py(c))
                : 0.0;
    }
    return h;
}

double JointSource::mutual_information() const { return entropy_x() - entropy_x_given_y(); }

std::pair<int, int> JointSource::sample(SplitRng& rng) const {
    const double u = rng.uniform();
    std::size_t k = 0;
    while (k + 1 < cumulative_.size() && u >= cumulative_[k]) ++k;
    const int cols = ny();
    return {static_cast<int>(k) / cols, static_cast<int>(k) % cols};
}

JointSource JointSource::dsbs(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("dsbs: p must be in [0,1]");
    Eigen::MatrixXd m(2, 2);
    m << (1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0;
    return JointSource(m);
}

JointSource JointSource::independent_bits() {
    Eigen::MatrixXd m(2, 2);
    m.setConstant(0.25);
    return JointSource(m);
}

JointSource JointSource::identical_bits() { return dsbs(0.0); }

TestChannel::TestChannel(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
    if (rows_.rows() < 1 || rows_.cols() < 1) throw std::invalid_argument("TestChannel: empty");
    if (rows_.minCoeff() < 0.0) throw std::invalid_argument("TestChannel: negative entry");
    for (int r = 0; r < rows_.rows(); ++r)
        if (std::abs(rows_.row(r).sum() - 1.0) > 1e-12)
            throw std::invalid_argument("TestChannel: row must sum to 1");
}

TestChannel TestChannel::identity(int nx, int u_card) {
    if (u_card < nx) throw std::invalid_argument("TestChannel::identity: u_card < nx");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nx, u_card);
    for (int r = 0; r < nx; ++r) m(r, r) = 1.0;
    return TestChannel(m);
}

TestChannel TestChannel::uniform(int nx, int u_card) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(nx, u_card, 1.0 / u_card);
    return TestChannel(m);
}

}  // namespace crmimo
