#include "lossless/input_signal.hpp"

#include "lossless/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lossless {

InputSignal::InputSignal() : kind_(Kind::zero) {}

InputSignal InputSignal::zero()
{
    return InputSignal{};
}

InputSignal InputSignal::sampled(std::vector<double> times, std::vector<double> values)
{
    if (times.size() != values.size())
        throw InvalidArgument("sampled input: times and values differ in length");
    if (times.size() < 2)
        throw InvalidArgument("sampled input: need at least two samples");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw InvalidArgument("sampled input: times must be strictly increasing");
    InputSignal s;
    s.kind_ = Kind::sampled;
    s.t_begin_ = times.front();
    s.t_end_ = times.back();
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    return s;
}

InputSignal InputSignal::closed_form(Function u, Function du, Function ddu, double t_begin,
                                     double t_end)
{
    if (!u)
        throw InvalidArgument("closed-form input: empty handle");
    if (static_cast<bool>(du) != static_cast<bool>(ddu))
        throw InvalidArgument("closed-form input: supply both derivative handles or neither");
    if (!(t_end > t_begin))
        throw InvalidArgument("closed-form input: empty domain");
    InputSignal s;
    s.kind_ = Kind::closed_form;
    s.t_begin_ = t_begin;
    s.t_end_ = t_end;
    s.u_ = std::move(u);
    s.du_ = std::move(du);
    s.ddu_ = std::move(ddu);
    return s;
}

bool InputSignal::has_derivatives() const noexcept
{
    return kind_ == Kind::zero || (kind_ == Kind::closed_form && du_ && ddu_);
}

bool InputSignal::defined_at(double t) const noexcept
{
    return t >= t_begin_ && t <= t_end_;
}

namespace {

void require_domain(const InputSignal& s, double t)
{
    if (!s.defined_at(t))
        throw InvalidArgument("input undefined at t = " + std::to_string(t));
}

} // namespace

double InputSignal::value(double t) const
{
    require_domain(*this, t);
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::closed_form:
        return u_(t);
    case Kind::sampled: {
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        std::size_t hi = static_cast<std::size_t>(it - times_.begin());
        if (hi >= times_.size())
            return values_.back();
        const std::size_t lo = hi - 1;
        const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
        return (1.0 - w) * values_[lo] + w * values_[hi];
    }
    }
    return 0.0;
}

double InputSignal::derivative(double t) const
{
    require_domain(*this, t);
    if (kind_ == Kind::zero)
        return 0.0;
    if (kind_ != Kind::closed_form || !du_)
        throw InvalidArgument("input has no derivative handle");
    return du_(t);
}

double InputSignal::second_derivative(double t) const
{
    require_domain(*this, t);
    if (kind_ == Kind::zero)
        return 0.0;
    if (kind_ != Kind::closed_form || !ddu_)
        throw InvalidArgument("input has no second-derivative handle");
    return ddu_(t);
}

InputSignal InputSignal::reversed(double horizon, double sign) const
{
    switch (kind_) {
    case Kind::zero:
        return *this;
    case Kind::sampled: {
        std::vector<double> t(times_.size()), v(values_.size());
        for (std::size_t i = 0; i < times_.size(); ++i) {
            const std::size_t j = times_.size() - 1 - i;
            t[i] = horizon - times_[j];
            v[i] = sign * values_[j];
        }
        return sampled(std::move(t), std::move(v));
    }
    case Kind::closed_form: {
        auto u = u_;
        Function fu = [u, horizon, sign](double s) { return sign * u(horizon - s); };
        Function fdu, fddu;
        if (du_) {
            auto du = du_;
            auto ddu = ddu_;
            fdu = [du, horizon, sign](double s) { return -sign * du(horizon - s); };
            fddu = [ddu, horizon, sign](double s) { return sign * ddu(horizon - s); };
        }
        return closed_form(std::move(fu), std::move(fdu), std::move(fddu), horizon - t_end_,
                           horizon - t_begin_);
    }
    }
    return *this;
}

namespace inputs {

InputSignal one_minus_cos(double omega)
{
    return InputSignal::closed_form(
        [omega](double t) { return 1.0 - std::cos(omega * t); },
        [omega](double t) { return omega * std::sin(omega * t); },
        [omega](double t) { return omega * omega * std::cos(omega * t); });
}

InputSignal sine(double omega)
{
    return InputSignal::closed_form(
        [omega](double t) { return std::sin(omega * t); },
        [omega](double t) { return omega * std::cos(omega * t); },
        [omega](double t) { return -omega * omega * std::sin(omega * t); });
}

InputSignal sin_squared()
{
    return InputSignal::closed_form([](double t) { return std::sin(t) * std::sin(t); },
                                    [](double t) { return std::sin(2.0 * t); },
                                    [](double t) { return 2.0 * std::cos(2.0 * t); });
}

InputSignal cosine(double omega)
{
    return InputSignal::closed_form(
        [omega](double t) { return std::cos(omega * t); },
        [omega](double t) { return -omega * std::sin(omega * t); },
        [omega](double t) { return -omega * omega * std::cos(omega * t); });
}

} // namespace inputs

} // namespace lossless
