#include "okdrop/io.hpp"

#include <cmath>

namespace okdrop {

namespace {

double number_at(const Json &j, const std::string &ptr) {
    if (!j.is_number())
        throw SchemaError(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw SchemaError(ptr, "expected a finite number");
    return v;
}

const Json &field(const Json &j, const char *key, const std::string &ptr) {
    if (!j.contains(key))
        throw SchemaError(ptr + "/" + key, "missing field");
    return j.at(key);
}

void require_object(const Json &j, const std::string &ptr) {
    if (!j.is_object())
        throw SchemaError(ptr, "expected an object");
}

void require_array(const Json &j, const std::string &ptr) {
    if (!j.is_array())
        throw SchemaError(ptr, "expected an array");
}

Json breakdown_parts(const EnergyBreakdown &e) {
    Json j;
    j["label"] = to_string(e.label);
    j["perimeter_term"] = e.perimeter_term;
    j["area_term"] = e.area_term;
    j["self_interaction"] = e.self_interaction;
    j["pair_interaction"] = e.pair_interaction;
    j["background_term"] = e.background_term;
    j["total"] = e.total;
    return j;
}

} // namespace

Json to_json(Vec2 v) { return Json::array({v.x, v.y}); }

Json to_json(const Shape &s) {
    Json j;
    if (const auto *d = std::get_if<Disk>(&s)) {
        j["disk"] = d->radius;
    } else if (const auto *e = std::get_if<Ellipse>(&s)) {
        j["ellipse"] = {{"a", e->a}, {"b", e->b}, {"angle", e->angle}};
    } else {
        Json v = Json::array();
        for (const auto &p : std::get<Polygon>(s).vertices)
            v.push_back(to_json(p));
        j["polygon"] = v;
    }
    return j;
}

Json to_json(const ModelParams &p) {
    return {{"epsilon", p.epsilon}, {"ell", p.ell},  {"kappa", p.kappa}, {"delta_bar", p.delta_bar},
            {"gamma", p.gamma},     {"c1", p.c1},     {"c2", p.c2},       {"c3", p.c3},
            {"eps0", p.eps0}};
}

Json to_json(const DropletConfig &c) {
    Json d = Json::array();
    for (const auto &x : c.droplets)
        d.push_back({{"center", to_json(x.center)}, {"shape", to_json(x.shape)}});
    return {{"params", to_json(c.params)}, {"droplets", d}};
}

Json to_json(const PointConfig &c) {
    Json pts = Json::array();
    for (const auto &p : c.points)
        pts.push_back(to_json(p));
    return {{"cell", Json::array({to_json(c.cell.a()), to_json(c.cell.b())})},
            {"points", pts},
            {"background", c.background}};
}

Json to_json(const EnergyBreakdown &e) {
    Json j = breakdown_parts(e);
    Json extras = Json::object();
    for (const auto &[k, v] : e.extras)
        extras[k] = v;
    j["extras"] = extras;
    return j;
}

Json to_json(const WEstimate &w) {
    Json j{{"W", w.value}, {"method", to_string(w.method)}, {"error_bar", w.error_bar}};
    if (!w.radii.empty()) {
        j["radii"] = w.radii;
        j["per_radius"] = w.per_radius;
        j["eta_slope"] = w.eta_slope;
    }
    return j;
}

Json to_json(const BallCollection &c) {
    Json balls = Json::array();
    for (const auto &b : c.balls)
        balls.push_back({{"center", to_json(b.center)}, {"radius", b.radius}, {"covers", b.covered}});
    Json j{{"stage", to_string(c.stage)}, {"total_radius", c.total_radius}, {"side", c.side}, {"balls", balls}};
    if (c.stage == BallStage::grown)
        j["grown_to"] = c.grown_to;
    return j;
}

Json to_json(const VerifyReport &r) {
    Json balls = Json::array();
    for (const auto &b : r.balls)
        balls.push_back({{"center", to_json(b.ball.center)},
                         {"radius", b.ball.radius},
                         {"covers", b.ball.covered},
                         {"lhs", b.lhs},
                         {"bound", b.bound},
                         {"gap", b.gap},
                         {"log_prediction", b.log_prediction},
                         {"violation", b.violation}});
    return {{"r", r.r},
            {"r_B0", r.r_B0},
            {"c", r.c},
            {"violations", r.violations},
            {"collection", to_json(r.collection)},
            {"balls", balls}};
}

Json to_json(const DescentResult &r) {
    Json j{{"trace", r.trace},
           {"final_W", r.w.value},
           {"iterations", r.iterations},
           {"grad_norm", r.grad_norm},
           {"converged", r.converged},
           {"config", to_json(r.config)}};
    if (!r.diagnostic.empty())
        j["diagnostic"] = r.diagnostic;
    return j;
}

Json to_json(const UpperBoundReport &r) {
    Json pts = Json::array();
    for (const auto &p : r.points)
        pts.push_back({{"epsilon", p.epsilon},
                       {"F_eps", p.f_eps},
                       {"m", p.m},
                       {"tiles_per_side", p.tiles_per_side},
                       {"interior", p.interior},
                       {"interior_limit", p.interior_limit},
                       {"interior_exact", p.interior_exact},
                       {"annulus", p.annulus},
                       {"annulus_bound", p.annulus_bound}});
    return {{"points", pts},
            {"w_target", r.w_target},
            {"target", r.target},
            {"gap", r.final_gap},
            {"decreasing_in_eps", r.decreasing_in_eps},
            {"gap_shrinking", r.gap_shrinking}};
}

Vec2 vec2_from_json(const Json &j, const std::string &ptr) {
    if (!j.is_array() || j.size() != 2)
        throw SchemaError(ptr, "expected a 2-vector [x, y]");
    return {number_at(j[0], ptr + "/0"), number_at(j[1], ptr + "/1")};
}

Shape shape_from_json(const Json &j, const std::string &ptr) {
    require_object(j, ptr);
    if (j.size() != 1)
        throw SchemaError(ptr, "shape must have exactly one of disk, ellipse, polygon");
    if (j.contains("disk"))
        return Disk{number_at(j["disk"], ptr + "/disk")};
    if (j.contains("ellipse")) {
        const Json &e = j["ellipse"];
        const std::string p = ptr + "/ellipse";
        require_object(e, p);
        Ellipse el{number_at(field(e, "a", p), p + "/a"), number_at(field(e, "b", p), p + "/b"), 0.0};
        if (e.contains("angle"))
            el.angle = number_at(e["angle"], p + "/angle");
        return el;
    }
    if (j.contains("polygon")) {
        const Json &v = j["polygon"];
        const std::string p = ptr + "/polygon";
        require_array(v, p);
        Polygon poly;
        for (std::size_t i = 0; i < v.size(); ++i)
            poly.vertices.push_back(vec2_from_json(v[i], p + "/" + std::to_string(i)));
        return poly;
    }
    throw SchemaError(ptr, "unknown shape kind");
}

ModelParams params_from_json(const Json &j, ModelParams p, const std::string &ptr) {
    require_object(j, ptr);
    const std::pair<const char *, double *> fields[] = {
        {"epsilon", &p.epsilon}, {"ell", &p.ell}, {"kappa", &p.kappa}, {"delta_bar", &p.delta_bar},
        {"gamma", &p.gamma},     {"c1", &p.c1},   {"c2", &p.c2},       {"c3", &p.c3},
        {"eps0", &p.eps0}};
    for (const auto &[key, dst] : fields)
        if (j.contains(key))
            *dst = number_at(j[key], ptr + "/" + key);
    for (const auto &[key, _] : j.items()) {
        bool known = false;
        for (const auto &f : fields)
            known = known || key == f.first;
        if (!known)
            throw SchemaError(ptr + "/" + key, "unknown parameter");
    }
    return p;
}

DropletConfig droplet_config_from_json(const Json &j, const std::string &ptr) {
    require_object(j, ptr);
    DropletConfig c;
    if (j.contains("params"))
        c.params = params_from_json(j["params"], {}, ptr + "/params");
    if (j.contains("droplets")) {
        const Json &d = j["droplets"];
        require_array(d, ptr + "/droplets");
        for (std::size_t i = 0; i < d.size(); ++i) {
            const std::string p = ptr + "/droplets/" + std::to_string(i);
            require_object(d[i], p);
            c.droplets.push_back(
                {vec2_from_json(field(d[i], "center", p), p + "/center"), shape_from_json(field(d[i], "shape", p), p + "/shape")});
        }
    }
    return c;
}

PointConfig point_config_from_json(const Json &j, const std::string &ptr) {
    require_object(j, ptr);
    const Json &cell = field(j, "cell", ptr);
    if (!cell.is_array() || cell.size() != 2)
        throw SchemaError(ptr + "/cell", "expected [[v1x, v1y], [v2x, v2y]]");
    const Vec2 a = vec2_from_json(cell[0], ptr + "/cell/0");
    const Vec2 b = vec2_from_json(cell[1], ptr + "/cell/1");
    if (!(std::abs(cross(a, b)) > 0.0))
        throw SchemaError(ptr + "/cell", "cell vectors are degenerate");
    const Json &pts = field(j, "points", ptr);
    require_array(pts, ptr + "/points");
    std::vector<Vec2> points;
    for (std::size_t i = 0; i < pts.size(); ++i)
        points.push_back(vec2_from_json(pts[i], ptr + "/points/" + std::to_string(i)));
    PointConfig c = PointConfig::neutral(Cell(a, b), points);
    if (j.contains("background"))
        c.background = number_at(j["background"], ptr + "/background");
    return c;
}

} // namespace okdrop
