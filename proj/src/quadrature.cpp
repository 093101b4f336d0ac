#include "drivenbath/quadrature.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace drivenbath {

namespace {

// QUADPACK dqk15 nodes and weights on [-1, 1].
constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double integral;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double f_center = f(center);
    double kronrod = kKronrodWeights[7] * f_center;
    double gauss = kGaussWeights[3] * f_center;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double f_sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * f_sum;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * f_sum;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.integral = kronrod * half;
    p.error = std::fabs((kronrod - gauss) * half);
    return p;
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol, std::size_t max_intervals) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::priority_queue<Panel> panels;
    Panel first = evaluate_panel(f, a, b);
    double total = first.integral;
    double total_error = first.error;
    panels.push(first);

    while (total_error > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (panels.size() >= max_intervals)
            throw std::runtime_error("integrate_adaptive: did not converge within budget");
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b)
            throw std::runtime_error("integrate_adaptive: interval vanished before converging");
        const Panel left = evaluate_panel(f, worst.a, mid);
        const Panel right = evaluate_panel(f, mid, worst.b);
        total += left.integral + right.integral - worst.integral;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    return sign * total;
}

} // namespace drivenbath
