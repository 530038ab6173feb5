#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "saddle/error.hpp"
#include "saddle/surface.hpp"

namespace saddle {

/// Parse a surface document:
///
///     { "name": "...",
///       "polygons": [ { "vertices": [[x, y], ...] }, ... ],
///       "gluings": [ [[p, e], [q, f]], ... ] }
///
/// Throws ParseError for malformed JSON or shape, ValidationError for
/// documents that parse but describe an invalid surface.
inline TranslationSurface load_surface(const std::string& document)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(document);
    }
    catch(const nlohmann::json::parse_error& e)
    {
        throw ParseError(std::string("surface document: ") + e.what());
    }

    std::string name;
    std::vector<PolygonChart> polygons;
    GluingMap gluings;
    try
    {
        if(!j.is_object())
            throw ParseError("surface document must be a JSON object");
        name = j.value("name", std::string("unnamed"));
        for(const auto& jp : j.at("polygons"))
        {
            PolygonChart poly;
            for(const auto& jv : jp.at("vertices"))
            {
                if(!jv.is_array() || jv.size() != 2)
                    throw ParseError("vertex must be a pair [x, y]");
                poly.vertices.emplace_back(jv[0].get<double>(), jv[1].get<double>());
            }
            polygons.push_back(std::move(poly));
        }
        for(const auto& jg : j.at("gluings"))
        {
            if(!jg.is_array() || jg.size() != 2 || jg[0].size() != 2 || jg[1].size() != 2)
                throw ParseError("gluing must be [[p, e], [q, f]]");
            gluings.pairs.push_back({EdgeRef{jg[0][0].get<int>(), jg[0][1].get<int>()},
                                     EdgeRef{jg[1][0].get<int>(), jg[1][1].get<int>()}});
        }
    }
    catch(const nlohmann::json::exception& e)
    {
        throw ParseError(std::string("surface document: ") + e.what());
    }
    return TranslationSurface::create(std::move(name), std::move(polygons), std::move(gluings));
}

inline TranslationSurface load_surface_file(const std::string& path)
{
    std::ifstream in(path);
    if(!in)
        throw ParseError("cannot open surface file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_surface(ss.str());
}

inline nlohmann::json surface_to_json(const TranslationSurface& s)
{
    nlohmann::json j;
    j["name"] = s.name();
    j["polygons"] = nlohmann::json::array();
    for(const auto& p : s.polygons())
    {
        nlohmann::json verts = nlohmann::json::array();
        for(const auto& v : p.vertices)
            verts.push_back({v.x, v.y});
        j["polygons"].push_back({{"vertices", verts}});
    }
    j["gluings"] = nlohmann::json::array();
    for(const auto& [a, b] : s.gluings().pairs)
        j["gluings"].push_back({{a.polygon, a.edge}, {b.polygon, b.edge}});
    return j;
}

/// Canonical text form; doubles use the shortest round-trip representation,
/// so load_surface(serialize_surface(s)) == s and serialization is byte-stable.
inline std::string serialize_surface(const TranslationSurface& s)
{
    return surface_to_json(s).dump(2) + "\n";
}

} // namespace saddle
