#pragma once

#include <string>
#include <vector>

namespace hawkes_impact {

/// Metaorder execution profile f on [0,1], piecewise linear between knots and
/// zero outside [knots.front(), knots.back()].
class Profile {
public:
    /// f = 1 on [0,1]
    static Profile flat();
    static Profile from_points(std::vector<double> x, std::vector<double> y, std::string id = "custom");
    /// Two columns x,f; '#' lines and a non-numeric header are skipped.
    static Profile from_csv(const std::string& path);
    /// "flat" or a CSV path.
    static Profile parse(const std::string& spec);

    double operator()(double x) const;
    double sup() const noexcept { return sup_; }
    /// int_0^x f
    double integral(double x) const;
    double total() const { return integral(1.0); }

    const std::vector<double>& knots() const noexcept { return x_; }
    const std::vector<double>& values() const noexcept { return y_; }
    const std::string& id() const noexcept { return id_; }

    /// Returns a copy with every value multiplied by c >= 0.
    Profile scaled(double c) const;

private:
    Profile(std::vector<double> x, std::vector<double> y, std::string id);

    std::vector<double> x_, y_;
    std::vector<double> cum_;
    double sup_ = 0.0;
    std::string id_;
};

}  // namespace hawkes_impact
