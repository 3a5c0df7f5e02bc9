#include "freqent/hybrid_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freqent/errors.hpp"
#include "freqent/numfmt.hpp"

namespace freqent {

namespace {

using cplx = std::complex<double>;

constexpr double kDropThreshold = 1e-28;  // |amplitude|^2 below this is zero

bool same_pair(const ProductTerm& a, const ProductTerm& b) {
  return a.photon1.same_as(b.photon1) && a.photon2.same_as(b.photon2);
}

bool polarization_basis(const PhotonLabel& p) {
  return p.pol != Pol::None && p.sam == Sam::None;
}

bool sam_basis(const PhotonLabel& p) {
  return p.sam != Sam::None && p.pol == Pol::None;
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value))
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be finite");
}

template <typename Fn>
TwoPhotonState map_photons(const TwoPhotonState& state, Fn&& fn) {
  std::vector<ProductTerm> out;
  out.reserve(state.terms().size());
  for (const auto& term : state.terms())
    out.push_back({term.amplitude, fn(term.photon1), fn(term.photon2)});
  return TwoPhotonState(std::move(out), state.center_frequency());
}

}  // namespace

bool PhotonLabel::same_as(const PhotonLabel& other) const noexcept {
  return pol == other.pol && sam == other.sam && oam == other.oam &&
         mode == other.mode &&
         std::abs(detuning - other.detuning) <= kDetuningTolerance;
}

TwoPhotonState::TwoPhotonState(std::vector<ProductTerm> terms,
                               double center_frequency)
    : center_frequency_(center_frequency) {
  for (auto& term : terms) {
    if (!std::isfinite(term.photon1.detuning) ||
        !std::isfinite(term.photon2.detuning))
      throw Error(ErrorKind::InvalidState, "photon detuning must be finite");
    auto it = std::find_if(terms_.begin(), terms_.end(),
                           [&](const ProductTerm& t) { return same_pair(t, term); });
    if (it == terms_.end())
      terms_.push_back(term);
    else
      it->amplitude += term.amplitude;
  }
  std::erase_if(terms_, [](const ProductTerm& t) {
    return std::norm(t.amplitude) < kDropThreshold;
  });
  const double n2 = norm_squared();
  if (terms_.empty() || !(n2 > 0.0))
    throw Error(ErrorKind::EmptyState, "state has no surviving terms");
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& t : terms_) t.amplitude *= scale;
}

double TwoPhotonState::norm_squared() const noexcept {
  double sum = 0.0;
  for (const auto& t : terms_) sum += std::norm(t.amplitude);
  return sum;
}

TwoPhotonState TwoPhotonState::exchanged() const {
  std::vector<ProductTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({t.amplitude, t.photon2, t.photon1});
  return TwoPhotonState(std::move(out), center_frequency_);
}

std::string TwoPhotonState::describe() const {
  std::ostringstream os;
  for (const auto& t : terms_) {
    os << "  (" << format_number(t.amplitude.real());
    if (t.amplitude.imag() != 0.0)
      os << (t.amplitude.imag() < 0 ? " - " : " + ")
         << format_number(std::abs(t.amplitude.imag())) << "i";
    os << ") " << to_string(t.photon1) << " " << to_string(t.photon2) << "\n";
  }
  return os.str();
}

std::string to_string(const PhotonLabel& label) {
  std::ostringstream os;
  os << "|";
  const char* sep = "";
  if (label.pol != Pol::None) {
    os << (label.pol == Pol::H ? "H" : "V");
    sep = ", ";
  }
  if (label.sam != Sam::None) {
    os << sep << (label.sam == Sam::Plus ? "s+" : "s-");
    sep = ", ";
  }
  os << sep << "l=" << (label.oam > 0 ? "+" : "") << label.oam
     << ", nu=" << format_number(label.detuning) << ">";
  if (label.mode == Mode::A) os << "_a";
  if (label.mode == Mode::B) os << "_b";
  return os.str();
}

TwoPhotonState new_spdc_state(double center_frequency) {
  if (!(center_frequency > 0.0) || !std::isfinite(center_frequency))
    throw Error(ErrorKind::InvalidArgument, "center frequency must be positive");
  const cplx amp(1.0 / std::numbers::sqrt2, 0.0);
  PhotonLabel h{.pol = Pol::H};
  PhotonLabel v{.pol = Pol::V};
  return TwoPhotonState({{amp, h, v}, {amp, v, h}}, center_frequency);
}

TwoPhotonState apply_qwp(const TwoPhotonState& state, QwpDirection direction) {
  return map_photons(state, [direction](PhotonLabel p) {
    if (direction == QwpDirection::Forward) {
      if (!polarization_basis(p))
        throw Error(ErrorKind::InvalidState,
                    "forward QWP needs linear polarization labels");
      p.sam = p.pol == Pol::H ? Sam::Plus : Sam::Minus;
      p.pol = Pol::None;
    } else {
      if (!sam_basis(p))
        throw Error(ErrorKind::InvalidState, "inverse QWP needs SAM labels");
      p.pol = p.sam == Sam::Plus ? Pol::H : Pol::V;
      p.sam = Sam::None;
    }
    return p;
  });
}

TwoPhotonState apply_rotating_qplate(const TwoPhotonState& state, int l,
                                     double omega_rot) {
  if (l < 0) throw Error(ErrorKind::InvalidArgument, "q-plate l must be >= 0");
  require_finite(omega_rot, "rotation rate");
  const double shift = static_cast<double>(l) * omega_rot;
  return map_photons(state, [&](PhotonLabel p) {
    if (!sam_basis(p))
      throw Error(ErrorKind::InvalidState, "q-plate needs SAM labels");
    const int s = p.sam == Sam::Plus ? 1 : -1;
    p.sam = s > 0 ? Sam::Minus : Sam::Plus;
    p.oam += s * l;
    p.detuning += s * shift;
    return p;
  });
}

TwoPhotonState apply_polarizer_projection(const TwoPhotonState& state) {
  return map_photons(state, [](PhotonLabel p) {
    if (p.sam != Sam::None)
      throw Error(ErrorKind::InvalidState,
                  "polarizer needs linear polarization labels");
    p.pol = Pol::None;
    return p;
  });
}

TwoPhotonState apply_delay_and_beamsplitter(const TwoPhotonState& state,
                                            double tau) {
  require_finite(tau, "delay");
  std::vector<ProductTerm> out;
  out.reserve(state.terms().size());
  for (const auto& t : state.terms()) {
    for (const auto* p : {&t.photon1, &t.photon2}) {
      if (p->pol != Pol::None || p->sam != Sam::None || p->mode != Mode::Source)
        throw Error(ErrorKind::InvalidState,
                    "beam splitter needs a frequency-entangled source state");
    }
    const double w_a = state.center_frequency() + t.photon1.detuning;
    ProductTerm shifted = t;
    shifted.amplitude *= std::polar(1.0, w_a * tau);
    shifted.photon1.mode = Mode::A;
    shifted.photon2.mode = Mode::B;
    out.push_back(shifted);
  }
  return TwoPhotonState(std::move(out), state.center_frequency());
}

std::vector<TwoPhotonState> run_pipeline(int l, double omega_rot,
                                         double center_frequency) {
  auto psi_p = new_spdc_state(center_frequency);
  auto psi_s = apply_qwp(psi_p, QwpDirection::Forward);
  auto psi_h = apply_rotating_qplate(psi_s, l, omega_rot);
  auto psi_o =
      apply_polarizer_projection(apply_qwp(psi_h, QwpDirection::Inverse));
  return {std::move(psi_p), std::move(psi_s), std::move(psi_h), std::move(psi_o)};
}

std::complex<double> state_overlap(const TwoPhotonState& s1,
                                   const TwoPhotonState& s2) {
  cplx sum{};
  for (const auto& a : s1.terms())
    for (const auto& b : s2.terms())
      if (same_pair(a, b)) sum += std::conj(a.amplitude) * b.amplitude;
  return sum;
}

}  // namespace freqent
