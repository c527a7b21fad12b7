#include "hfrac/vertical.hpp"

#include "fft.hpp"

#include <cmath>

namespace hfrac {

VerticalSymbol VerticalSymbol::bessel(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("VerticalSymbol::bessel: alpha must be > 0");
  return {Kind::Bessel, Complex(a, 0.0)};
}

Complex VerticalSymbol::value(double tau) const {
  switch (kind) {
    case Kind::AbsPower: {
      if (tau == 0.0) return alpha == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      return std::exp(alpha * std::log(2.0 * M_PI * std::abs(tau)));
    }
    case Kind::Hilbert:
      return Complex(tau > 0.0 ? 1.0 : (tau < 0.0 ? -1.0 : 0.0), 0.0);
    case Kind::Bessel:
      return std::pow(1.0 + 4.0 * M_PI * M_PI * tau * tau, -0.5 * alpha.real());
    case Kind::OnePlusAbsT:
      return std::pow(1.0 + 4.0 * M_PI * M_PI * tau * tau, 0.5 * alpha.real());
  }
  throw std::logic_error("VerticalSymbol: unreachable");
}

GridField vertical_multiplier(const GridField& f, const VerticalSymbol& sym) {
  if (f.spec.mode != BoundaryMode::Periodic) {
    throw std::invalid_argument("vertical_multiplier: requires a periodic grid");
  }
  const int nt = f.spec.vertical().count;
  const double L = f.spec.vertical().length();

  std::vector<Complex> symbol(nt);
  for (int k = 0; k < nt; ++k) {
    double tau = detail::bin_frequency(k, nt, L);
    // Unpaired Nyquist bin of a sign-odd symbol: zero it.
    if (sym.kind == VerticalSymbol::Kind::Hilbert && nt % 2 == 0 && k == nt / 2) {
      symbol[k] = Complex(0.0, 0.0);
      continue;
    }
    symbol[k] = sym.value(tau);
    if (!std::isfinite(symbol[k].real()) || !std::isfinite(symbol[k].imag())) {
      throw std::runtime_error("vertical_multiplier: non-finite symbol value");
    }
  }

  GridField out = f;
  const std::size_t lines = f.spec.num_lines();
  for (std::size_t l = 0; l < lines; ++l) {
    auto line = out.line_mut(l);
    detail::fft_inplace(line.data(), nt, -1);
    for (int k = 0; k < nt; ++k) line[k] *= symbol[k];
    detail::fft_inplace(line.data(), nt, +1);
  }
  return out;
}

double hilbert_involution_check(const GridField& f) {
  const int nt = f.spec.vertical().count;
  const double scale = lp_norm(f, std::numeric_limits<double>::infinity());
  for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
    Complex mean(0.0, 0.0);
    for (const auto& v : f.line(l)) mean += v;
    mean /= static_cast<double>(nt);
    if (std::abs(mean) > 1e-10 * std::max(1.0, scale)) {
      throw std::invalid_argument("hilbert_involution_check: input has a non-mean-zero line");
    }
  }
  const auto H = VerticalSymbol::hilbert();
  GridField hh = vertical_multiplier(vertical_multiplier(f, H), H);
  return lp_norm(hh - f, 2.0) / lp_norm(f, 2.0);
}

GridField vertical_shift(const GridField& f, double s) {
  if (s == 0.0) return f;
  const int nt = f.spec.vertical().count;
  const double h = f.spec.vertical().spacing();
  const double L = f.spec.vertical().length();

  if (f.spec.mode == BoundaryMode::ZeroExtended) {
    if (std::abs(s) >= 0.5 * L) {
      throw std::invalid_argument("vertical_shift: |s| exceeds representable range (zero-extended)");
    }
    GridField out(f.spec);
    const double u = s / h;
    const double fl = std::floor(u);
    const int m = static_cast<int>(fl);
    const double w = u - fl;
    for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
      auto src = f.line(l);
      auto dst = out.line_mut(l);
      for (int j = 0; j < nt; ++j) {
        const int j0 = j + m, j1 = j + m + 1;
        Complex v0 = (j0 >= 0 && j0 < nt) ? src[j0] : Complex(0.0, 0.0);
        Complex v1 = (j1 >= 0 && j1 < nt) ? src[j1] : Complex(0.0, 0.0);
        dst[j] = (1.0 - w) * v0 + w * v1;
      }
    }
    return out;
  }

  // Periodic: exact circular shift on lattice shifts, otherwise spectral.
  const double cells = s / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) < 1e-12 * std::max(1.0, std::abs(cells))) {
    GridField out(f.spec);
    const int m = static_cast<int>(std::llround(rounded)) % nt;
    for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
      auto src = f.line(l);
      auto dst = out.line_mut(l);
      for (int j = 0; j < nt; ++j) dst[j] = src[(((j + m) % nt) + nt) % nt];
    }
    return out;
  }

  GridField out = f;
  std::vector<Complex> phase(nt);
  for (int k = 0; k < nt; ++k) {
    const double tau = detail::bin_frequency(k, nt, L);
    if (nt % 2 == 0 && k == nt / 2) {
      // real-valued convention for the unpaired Nyquist bin
      phase[k] = Complex(std::cos(2.0 * M_PI * tau * s), 0.0);
    } else {
      phase[k] = std::polar(1.0, 2.0 * M_PI * tau * s);
    }
  }
  for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
    auto line = out.line_mut(l);
    detail::fft_inplace(line.data(), nt, -1);
    for (int k = 0; k < nt; ++k) line[k] *= phase[k];
    detail::fft_inplace(line.data(), nt, +1);
  }
  return out;
}

GridField vertical_convolve(const GridField& f, std::span<const double> taps) {
  if (taps.empty() || taps.size() % 2 == 0) {
    throw std::invalid_argument("vertical_convolve: taps must have odd length");
  }
  const int nt = f.spec.vertical().count;
  if (static_cast<int>(taps.size()) > nt) {
    throw std::invalid_argument("vertical_convolve: kernel longer than the line");
  }
  const double h = f.spec.vertical().spacing();
  const int half = static_cast<int>(taps.size()) / 2;

  if (f.spec.mode == BoundaryMode::Periodic) {
    // circular convolution via the spectral path
    std::vector<Complex> khat(nt, Complex(0.0, 0.0));
    for (int j = -half; j <= half; ++j) {
      khat[((j % nt) + nt) % nt] += Complex(taps[j + half] * h, 0.0);
    }
    detail::fft_inplace(khat.data(), nt, -1);
    GridField out = f;
    for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
      auto line = out.line_mut(l);
      detail::fft_inplace(line.data(), nt, -1);
      for (int k = 0; k < nt; ++k) line[k] *= khat[k];
      detail::fft_inplace(line.data(), nt, +1);
    }
    return out;
  }

  GridField out(f.spec);
  for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
    auto src = f.line(l);
    auto dst = out.line_mut(l);
    for (int j = 0; j < nt; ++j) {
      Complex acc(0.0, 0.0);
      for (int m = -half; m <= half; ++m) {
        const int jm = j - m;
        if (jm >= 0 && jm < nt) acc += src[jm] * taps[m + half];
      }
      dst[j] = acc * h;
    }
  }
  return out;
}

}  // namespace hfrac
