#pragma once

#include "okdrop/balls.hpp"
#include "okdrop/okenergy.hpp"
#include "okdrop/optimizer.hpp"
#include "okdrop/renorm.hpp"
#include "okdrop/shapes.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace okdrop {

using Json = nlohmann::ordered_json;

// Input JSON does not match the expected schema; `pointer` locates the failure.
class SchemaError : public std::runtime_error {
  public:
    SchemaError(std::string pointer, const std::string &what)
        : std::runtime_error(what + " at " + (pointer.empty() ? "/" : pointer)), pointer_(std::move(pointer)) {}
    const std::string &pointer() const { return pointer_; }

  private:
    std::string pointer_;
};

Json to_json(Vec2 v);
Json to_json(const Shape &s);
Json to_json(const ModelParams &p);
Json to_json(const DropletConfig &c);
Json to_json(const PointConfig &c);
Json to_json(const EnergyBreakdown &e);
Json to_json(const WEstimate &w);
Json to_json(const BallCollection &c);
Json to_json(const VerifyReport &r);
Json to_json(const DescentResult &r);
Json to_json(const UpperBoundReport &r);

// Parsers; `ptr` is the JSON pointer of `j` within the document.
Vec2 vec2_from_json(const Json &j, const std::string &ptr = "");
Shape shape_from_json(const Json &j, const std::string &ptr = "");
// Missing fields keep the values already in `base`.
ModelParams params_from_json(const Json &j, ModelParams base = {}, const std::string &ptr = "");
DropletConfig droplet_config_from_json(const Json &j, const std::string &ptr = "");
PointConfig point_config_from_json(const Json &j, const std::string &ptr = "");

} // namespace okdrop
