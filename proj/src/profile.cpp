#include "hawkes_impact/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hawkes_impact/errors.hpp"

namespace hawkes_impact {

Profile::Profile(std::vector<double> x, std::vector<double> y, std::string id)
    : x_(std::move(x)), y_(std::move(y)), id_(std::move(id)) {
    if (x_.size() < 2 || x_.size() != y_.size()) throw DomainError("profile needs at least two (x, f) points");
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw DomainError("profile values must be finite");
        if (y_[i] < 0.0) throw DomainError("profile must be non-negative");
        if (i > 0 && !(x_[i] > x_[i - 1])) throw DomainError("profile knots must be increasing");
    }
    if (x_.front() < 0.0 || x_.back() > 1.0) throw DomainError("profile knots must lie in [0,1]");
    cum_.assign(x_.size(), 0.0);
    for (std::size_t i = 1; i < x_.size(); ++i) cum_[i] = cum_[i - 1] + 0.5 * (y_[i] + y_[i - 1]) * (x_[i] - x_[i - 1]);
    sup_ = *std::max_element(y_.begin(), y_.end());
}

Profile Profile::flat() { return Profile({0.0, 1.0}, {1.0, 1.0}, "flat"); }

Profile Profile::from_points(std::vector<double> x, std::vector<double> y, std::string id) {
    return Profile(std::move(x), std::move(y), std::move(id));
}

Profile Profile::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open profile file: " + path);
    std::vector<double> x, y;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a = 0.0, b = 0.0;
        if (!(ss >> a >> b)) {
            if (x.empty()) continue;  // header
            throw UsageError("malformed profile line: " + line);
        }
        x.push_back(a);
        y.push_back(b);
    }
    return Profile(std::move(x), std::move(y), path);
}

Profile Profile::parse(const std::string& spec) {
    if (spec == "flat") return flat();
    return from_csv(spec);
}

double Profile::operator()(double x) const {
    if (x < x_.front() || x > x_.back()) return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.end()) return y_.back();
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return (1.0 - w) * y_[i] + w * y_[i + 1];
}

double Profile::integral(double x) const {
    if (x <= x_.front()) return 0.0;
    if (x >= x_.back()) return cum_.back();
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return cum_[i] + 0.5 * (y_[i] + (*this)(x)) * (x - x_[i]);
}

Profile Profile::scaled(double c) const {
    if (!(c >= 0.0)) throw DomainError("profile scale must be non-negative");
    std::vector<double> y = y_;
    for (auto& v : y) v *= c;
    return Profile(x_, std::move(y), id_);
}

}  // namespace hawkes_impact
