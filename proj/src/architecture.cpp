#include "dpqa/architecture.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dpqa {

std::pair<int, int> deriveStacking(const PhysicalParams& phys) {
  const double rb2 = phys.rydbergRadiusUm * phys.rydbergRadiusUm;
  const double ds2 = phys.minSeparationUm * phys.minSeparationUm;
  int k = 1;
  while (2.0 * k * k * ds2 <= rb2) {
    ++k;
  }
  return {k, k};
}

namespace {

double axisOffsetExtent(int stack, double ds) {
  // Stacked lines sit on a d_s lattice centred on the site and shifted by a
  // quarter pitch so that no AOD trap lands on the SLM trap at the centre.
  return ((stack - 1) / 2.0 + 0.25) * ds;
}

} // namespace

double maxIntraSiteOffsetUm(const ArchSpec& spec) {
  return std::max(axisOffsetExtent(spec.colStack, spec.phys.minSeparationUm),
                  axisOffsetExtent(spec.rowStack, spec.phys.minSeparationUm));
}

double derivedSitePitch(const PhysicalParams& phys, int rowStack,
                        int colStack) {
  const int k = std::max(rowStack, colStack);
  const double ds = phys.minSeparationUm;
  const double extent = std::max((k - 1) * ds, axisOffsetExtent(k, ds));
  return std::ceil(2.5 * phys.rydbergRadiusUm + 2.0 * extent - 1e-9);
}

ArchSpec defaultArchSpec() {
  ArchSpec spec;
  const auto [rs, cs] = deriveStacking(spec.phys);
  spec.rowStack = rs;
  spec.colStack = cs;
  spec.sitePitchUm = derivedSitePitch(spec.phys, rs, cs);
  return spec;
}

std::vector<std::string> validate(const ArchSpec& spec) {
  std::vector<std::string> out;
  const auto& p = spec.phys;
  if (spec.x < 1 || spec.y < 1) {
    out.emplace_back("empty grid: X and Y must be at least 1");
  }
  if (spec.c < 1 || spec.r < 1) {
    out.emplace_back("no AOD lines: C and R must be at least 1");
  }
  if (!(p.rydbergRadiusUm > 0) || !(p.minSeparationUm > 0) ||
      !(p.moveTimeUs > 0) || !(p.moveDistanceUm > 0) ||
      !(p.coherenceTimeS > 0)) {
    out.emplace_back("physical parameters must be strictly positive");
  }
  if (!(p.twoQubitFidelity > 0) || p.twoQubitFidelity > 1) {
    out.emplace_back("two-qubit fidelity must lie in (0, 1]");
  }
  if (!(p.transferTimeUs >= 0)) {
    out.emplace_back("transfer time must be non-negative");
  }
  if (spec.rowStack < 1 || spec.colStack < 1) {
    out.emplace_back("stacking factors must be at least 1");
  } else {
    const double dr = spec.rowStack - 1;
    const double dc = spec.colStack - 1;
    if ((dr * dr + dc * dc) * p.minSeparationUm * p.minSeparationUm >
        p.rydbergRadiusUm * p.rydbergRadiusUm) {
      out.emplace_back("stacking inequality violated: corner atoms of a site "
                       "would be farther apart than r_b");
    }
    const double reach = std::sqrt(2.0) * maxIntraSiteOffsetUm(spec);
    if (reach > p.rydbergRadiusUm) {
      out.emplace_back("intra-site reach: an AOD atom can sit farther than "
                       "r_b from the SLM trap of its site");
    }
    const double crossSite = spec.sitePitchUm - 2.0 * maxIntraSiteOffsetUm(spec);
    if (!(crossSite > 2.5 * p.rydbergRadiusUm)) {
      std::ostringstream msg;
      msg << "site pitch too small: atoms at neighbouring sites can come within "
          << crossSite << " um, below 2.5 r_b";
      out.push_back(msg.str());
    }
  }
  return out;
}

void requireValid(const ArchSpec& spec) {
  const auto v = validate(spec);
  if (v.empty()) {
    return;
  }
  std::string msg = "invalid architecture:";
  for (const auto& s : v) {
    msg += "\n  " + s;
  }
  throw ArchError(msg);
}

namespace {

template <typename T>
void readField(const Json& doc, const char* key, T& dst) {
  if (!doc.contains(key)) {
    return;
  }
  try {
    dst = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ArchError(std::string("architecture field '") + key +
                    "' has the wrong type");
  }
}

} // namespace

ArchSpec loadArchSpec(const Json& doc) {
  if (!doc.is_object()) {
    throw ArchError("architecture document must be an object");
  }
  ArchSpec spec;
  readField(doc, "x", spec.x);
  readField(doc, "y", spec.y);
  readField(doc, "c", spec.c);
  readField(doc, "r", spec.r);
  readField(doc, "rb_um", spec.phys.rydbergRadiusUm);
  readField(doc, "ds_um", spec.phys.minSeparationUm);
  readField(doc, "t0_us", spec.phys.moveTimeUs);
  readField(doc, "d0_um", spec.phys.moveDistanceUm);
  readField(doc, "f2q", spec.phys.twoQubitFidelity);
  readField(doc, "tcoh_s", spec.phys.coherenceTimeS);
  readField(doc, "transfer_us", spec.phys.transferTimeUs);
  readField(doc, "transfers", spec.transfersAllowed);

  const auto [rs, cs] = deriveStacking(spec.phys);
  spec.rowStack = rs;
  spec.colStack = cs;
  readField(doc, "r_stk", spec.rowStack);
  readField(doc, "c_stk", spec.colStack);
  spec.sitePitchUm =
      derivedSitePitch(spec.phys, spec.rowStack, spec.colStack);
  readField(doc, "pitch_um", spec.sitePitchUm);
  return spec;
}

ArchSpec loadArchSpecFile(const std::string& path) {
  return loadArchSpec(readJsonFile(path));
}

Json toJson(const ArchSpec& spec) {
  Json doc;
  doc["x"] = spec.x;
  doc["y"] = spec.y;
  doc["c"] = spec.c;
  doc["r"] = spec.r;
  doc["rb_um"] = spec.phys.rydbergRadiusUm;
  doc["ds_um"] = spec.phys.minSeparationUm;
  doc["t0_us"] = spec.phys.moveTimeUs;
  doc["d0_um"] = spec.phys.moveDistanceUm;
  doc["f2q"] = spec.phys.twoQubitFidelity;
  doc["tcoh_s"] = spec.phys.coherenceTimeS;
  doc["transfer_us"] = spec.phys.transferTimeUs;
  doc["pitch_um"] = spec.sitePitchUm;
  doc["r_stk"] = spec.rowStack;
  doc["c_stk"] = spec.colStack;
  doc["transfers"] = spec.transfersAllowed;
  return doc;
}

} // namespace dpqa
