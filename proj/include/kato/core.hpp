#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace kato {

using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;
using cplxl = std::complex<long double>;

inline constexpr double pi = std::numbers::pi;

/// Process exit codes shared by the library errors and the command line tool.
enum class ExitCode : int { pass = 0, check_failure = 1, usage = 2, numerical = 3 };

/**
 * @brief Base class of every error thrown by the library.
 *
 * The name is the stable identifier that ends up in reports, the exit code
 * tells the command line tool how to terminate.
 */
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what, ExitCode code)
        : std::runtime_error(name + ": " + what), name_(std::move(name)), code_(code) {}
    const std::string& name() const noexcept { return name_; }
    ExitCode code() const noexcept { return code_; }

private:
    std::string name_;
    ExitCode code_;
};

#define KATO_DEFINE_ERROR(Name, Code)                                              \
    class Name : public Error {                                                    \
    public:                                                                        \
        explicit Name(const std::string& what) : Error(#Name, what, Code) {}       \
    };

KATO_DEFINE_ERROR(InvalidOrder, ExitCode::usage)
KATO_DEFINE_ERROR(InvalidArgument, ExitCode::usage)
KATO_DEFINE_ERROR(CoincidentPoints, ExitCode::usage)
KATO_DEFINE_ERROR(NonPositiveTime, ExitCode::usage)
KATO_DEFINE_ERROR(OutOfSupportedRange, ExitCode::usage)
KATO_DEFINE_ERROR(InsideCone, ExitCode::usage)
KATO_DEFINE_ERROR(ConfigParse, ExitCode::usage)
KATO_DEFINE_ERROR(Io, ExitCode::usage)
KATO_DEFINE_ERROR(PreconditionViolated, ExitCode::check_failure)
KATO_DEFINE_ERROR(NonConvergedQuadrature, ExitCode::numerical)
KATO_DEFINE_ERROR(NearSingularSolve, ExitCode::numerical)
KATO_DEFINE_ERROR(TrackingLost, ExitCode::numerical)
KATO_DEFINE_ERROR(TruncationTooTight, ExitCode::numerical)
KATO_DEFINE_ERROR(UnderresolvedOscillation, ExitCode::numerical)

#undef KATO_DEFINE_ERROR

inline double bracket(const Vec3& x) { return std::sqrt(1.0 + x.squaredNorm()); }

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

inline std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    if (n == 1) {
        v[0] = a;
        return v;
    }
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
    v.front() = a;
    v.back() = b;
    return v;
}

/// Legendre polynomials P_0..P_L at x.
inline void legendre_table(double x, int L, std::vector<double>& out) {
    out.assign(static_cast<size_t>(L + 1), 0.0);
    out[0] = 1.0;
    if (L >= 1) out[1] = x;
    for (int l = 1; l < L; ++l)
        out[static_cast<size_t>(l + 1)] =
            ((2 * l + 1) * x * out[static_cast<size_t>(l)] - l * out[static_cast<size_t>(l - 1)]) / (l + 1);
}

}  // namespace kato
