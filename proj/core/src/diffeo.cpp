#include "movdom/diffeo.hpp"

#include <cmath>

#include "movdom/errors.hpp"

namespace movdom {

JacobianData make_jacobian_data(const Mat& J) {
  JacobianData d;
  d.matrix = J;
  if (J.rows() == 1) {
    d.det = J(0, 0);
    d.inverse = Mat::Constant(1, 1, 1.0 / J(0, 0));
  } else {
    d.det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    d.inverse.resize(2, 2);
    d.inverse << J(1, 1), -J(0, 1), -J(1, 0), J(0, 0);
    d.inverse /= d.det;
  }
  d.inverse_transpose = d.inverse.transpose();
  return d;
}

DiffeoFamily::DiffeoFamily(Parts parts) : parts_(std::move(parts)) {
  if (parts_.dimension != 1 && parts_.dimension != 2) {
    throw InvalidArgument("diffeomorphism dimension must be 1 or 2");
  }
  if (!parts_.map) throw InvalidArgument("diffeomorphism needs a map evaluator");
  if (!(parts_.fd_step > 0.0)) throw InvalidArgument("fd_step must be positive");
}

void DiffeoFamily::check_time(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (!(t >= parts_.t_min - slack && t <= parts_.t_max + slack)) {
    throw InvalidArgument("time outside the validity window of " + parts_.name);
  }
}

Vec DiffeoFamily::map(double t, const Vec& y) const { return parts_.map(t, y); }

Vec DiffeoFamily::velocity(double t, const Vec& y) const {
  if (parts_.motionless) return Vec::Zero(parts_.dimension);
  if (parts_.velocity) return parts_.velocity(t, y);
  const double dt = 1e-5 * std::max(1.0, std::abs(t));
  return (parts_.map(t + dt, y) - parts_.map(t - dt, y)) / (2.0 * dt);
}

Mat DiffeoFamily::jacobian(double t, const Vec& y) const {
  if (parts_.jacobian) return parts_.jacobian(t, y);
  const int n = parts_.dimension;
  const double s = parts_.fd_step;
  Mat J(n, n);
  for (int k = 0; k < n; ++k) {
    Vec yp = y, ym = y;
    yp(k) += s;
    ym(k) -= s;
    J.col(k) = (parts_.map(t, yp) - parts_.map(t, ym)) / (2.0 * s);
  }
  return J;
}

Mat DiffeoFamily::jacobian_rate(double t, const Vec& y) const {
  const int n = parts_.dimension;
  if (parts_.motionless) return Mat::Zero(n, n);
  if (parts_.jacobian_rate) return parts_.jacobian_rate(t, y);
  const double s = parts_.fd_step;
  Mat R(n, n);
  for (int k = 0; k < n; ++k) {
    Vec yp = y, ym = y;
    yp(k) += s;
    ym(k) -= s;
    R.col(k) = (velocity(t, yp) - velocity(t, ym)) / (2.0 * s);
  }
  return R;
}

Vec DiffeoFamily::inverse(double t, const Vec& x) const {
  if (!parts_.inverse) {
    throw InverseUnavailable("no inverse evaluator for " + parts_.name);
  }
  return parts_.inverse(t, x);
}

DiffeoFamily DiffeoFamily::with_fd_step(double step) const {
  Parts p = parts_;
  p.fd_step = step;
  return DiffeoFamily(std::move(p));
}

DiffeoFamily DiffeoFamily::without_analytic_jacobian() const {
  Parts p = parts_;
  p.jacobian = nullptr;
  p.jacobian_rate = nullptr;
  return DiffeoFamily(std::move(p));
}

DiffeoFamily DiffeoFamily::time_rescaled(double eps) const {
  if (!(eps > 0.0)) throw InvalidArgument("time rescaling needs eps > 0");
  const Parts& q = parts_;
  Parts p = q;
  p.name = q.name + "@eps";
  p.map = [m = q.map, eps](double t, const Vec& y) { return m(eps * t, y); };
  const DiffeoFamily base = *this;
  p.velocity = [base, eps](double t, const Vec& y) {
    return Vec(eps * base.velocity(eps * t, y));
  };
  p.jacobian = [base, eps](double t, const Vec& y) {
    return base.jacobian(eps * t, y);
  };
  p.jacobian_rate = [base, eps](double t, const Vec& y) {
    return Mat(eps * base.jacobian_rate(eps * t, y));
  };
  if (q.inverse) {
    p.inverse = [inv = q.inverse, eps](double t, const Vec& x) {
      return inv(eps * t, x);
    };
  }
  p.t_min = q.t_min / eps;
  p.t_max = q.t_max / eps;
  return DiffeoFamily(std::move(p));
}

DiffeoFamily DiffeoFamily::frozen(double t0) const {
  const DiffeoFamily base = *this;
  Parts p = parts_;
  p.name = parts_.name + "@frozen";
  p.map = [m = parts_.map, t0](double, const Vec& y) { return m(t0, y); };
  p.velocity = nullptr;
  p.jacobian = [base, t0](double, const Vec& y) { return base.jacobian(t0, y); };
  p.jacobian_rate = nullptr;
  if (parts_.inverse) {
    p.inverse = [inv = parts_.inverse, t0](double, const Vec& x) {
      return inv(t0, x);
    };
  }
  p.t_min = -std::numeric_limits<double>::infinity();
  p.t_max = std::numeric_limits<double>::infinity();
  p.motionless = true;
  return DiffeoFamily(std::move(p));
}

DiffeoFamily DiffeoFamily::identity(int dimension) {
  Parts p;
  p.dimension = dimension;
  p.name = "identity";
  p.map = [](double, const Vec& y) { return y; };
  p.jacobian = [dimension](double, const Vec&) {
    return Mat(Mat::Identity(dimension, dimension));
  };
  p.inverse = [](double, const Vec& x) { return x; };
  p.motionless = true;
  return DiffeoFamily(std::move(p));
}

DiffeoFamily DiffeoFamily::translation(std::vector<ScalarPath> D) {
  const int n = static_cast<int>(D.size());
  Parts p;
  p.dimension = n;
  p.name = "translation";
  p.map = [D](double t, const Vec& y) {
    Vec x = y;
    for (std::size_t k = 0; k < D.size(); ++k) x(k) += D[k](t);
    return x;
  };
  p.velocity = [D](double t, const Vec&) {
    Vec v(static_cast<Index>(D.size()));
    for (std::size_t k = 0; k < D.size(); ++k) v(k) = D[k].d1(t);
    return v;
  };
  p.jacobian = [n](double, const Vec&) { return Mat(Mat::Identity(n, n)); };
  p.jacobian_rate = [n](double, const Vec&) { return Mat(Mat::Zero(n, n)); };
  p.inverse = [D](double t, const Vec& x) {
    Vec y = x;
    for (std::size_t k = 0; k < D.size(); ++k) y(k) -= D[k](t);
    return y;
  };
  return DiffeoFamily(std::move(p));
}

DiffeoFamily DiffeoFamily::rotation(double omega) {
  auto rot = [omega](double t) {
    const double c = std::cos(omega * t), s = std::sin(omega * t);
    Mat R(2, 2);
    R << c, -s, s, c;
    return R;
  };
  Parts p;
  p.dimension = 2;
  p.name = "rotation";
  p.map = [rot](double t, const Vec& y) { return Vec(rot(t) * y); };
  // d/dt R(t) y = omega (R y)^perp with perp(a, b) = (-b, a).
  p.velocity = [rot, omega](double t, const Vec& y) {
    const Vec x = rot(t) * y;
    Vec v(2);
    v << -omega * x(1), omega * x(0);
    return v;
  };
  p.jacobian = [rot](double t, const Vec&) { return rot(t); };
  p.jacobian_rate = [rot, omega](double t, const Vec&) {
    Mat P(2, 2);
    P << 0.0, -omega, omega, 0.0;
    return Mat(P * rot(t));
  };
  p.inverse = [rot](double t, const Vec& x) {
    return Vec(rot(t).transpose() * x);
  };
  return DiffeoFamily(std::move(p));
}

DiffeoFamily DiffeoFamily::diagonal(std::vector<ScalarPath> f) {
  const int n = static_cast<int>(f.size());
  Parts p;
  p.dimension = n;
  p.name = "diagonal";
  p.map = [f](double t, const Vec& y) {
    Vec x = y;
    for (std::size_t k = 0; k < f.size(); ++k) x(k) *= f[k](t);
    return x;
  };
  p.velocity = [f](double t, const Vec& y) {
    Vec v = y;
    for (std::size_t k = 0; k < f.size(); ++k) v(k) *= f[k].d1(t);
    return v;
  };
  p.jacobian = [f, n](double t, const Vec&) {
    Mat J = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) J(k, k) = f[k](t);
    return J;
  };
  p.jacobian_rate = [f, n](double t, const Vec&) {
    Mat R = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) R(k, k) = f[k].d1(t);
    return R;
  };
  p.inverse = [f](double t, const Vec& x) {
    Vec y = x;
    for (std::size_t k = 0; k < f.size(); ++k) y(k) /= f[k](t);
    return y;
  };
  return DiffeoFamily(std::move(p));
}

DiffeoFamily DiffeoFamily::homothety(const ScalarPath& f, int dimension) {
  DiffeoFamily d = diagonal(std::vector<ScalarPath>(dimension, f));
  d.parts_.name = "homothety";
  return d;
}

}  // namespace movdom
