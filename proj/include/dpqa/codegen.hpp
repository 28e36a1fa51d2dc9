#pragma once

#include "dpqa/architecture.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/json.hpp"
#include "dpqa/program.hpp"
#include "dpqa/solver.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dpqa {

/// The assignment cannot be realised as lines and traps. Points at an
/// encoder defect rather than a user error.
class CodegenError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// µm coordinates of the centre of interaction site (x, y); the SLM trap of
/// a site sits there.
Point siteCenter(int x, int y, const ArchSpec& spec);

/// Offset of the line of the given rank among `stack` lines sharing a site
/// coordinate.
double stackOffset(int rank, int stack, double minSeparationUm);

Program lower(const Assignment& asg, const Circuit& c, const ArchSpec& spec);

/// Qubit positions sampled for display. The first frame shows the initial
/// loading; every move contributes framesPerMove + 1 frames, both ends
/// included.
struct Frame {
  int instruction = 0;
  double tau = 0.0;
  std::vector<Point> positions;
};

std::vector<Frame> animationFrames(const Program& p, int framesPerMove);
Json toJson(const std::vector<Frame>& frames);
std::string frameSvg(const Program& p, const Frame& f);

} // namespace dpqa
