#include "specs/schema.hpp"

namespace specs {

namespace {

using nlohmann::json;

bool type_matches(const json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
}

bool validate_node(const json& doc, const json& schema, const std::string& path,
                   std::string* error) {
    auto fail = [&](const std::string& why) {
        if (error) *error = path + ": " + why;
        return false;
    };

    if (schema.contains("type")) {
        const auto& type = schema["type"];
        bool ok = false;
        if (type.is_string()) {
            ok = type_matches(doc, type.get<std::string>());
        } else if (type.is_array()) {
            for (const auto& t : type)
                if (type_matches(doc, t.get<std::string>())) ok = true;
        }
        if (!ok) return fail("type mismatch, got " + std::string(doc.type_name()));
    }

    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& candidate : schema["enum"])
            if (doc == candidate) ok = true;
        if (!ok) return fail("value not in enum");
    }

    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!doc.contains(key.get<std::string>()))
                    return fail("missing required key '" + key.get<std::string>() + "'");
        if (schema.contains("properties")) {
            for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
                if (!doc.contains(it.key())) continue;
                if (!validate_node(doc[it.key()], it.value(), path + "/" + it.key(), error))
                    return false;
            }
        }
        if (schema.contains("additionalProperties")) {
            const auto& extra = schema["additionalProperties"];
            for (auto it = doc.begin(); it != doc.end(); ++it) {
                const bool declared = schema.contains("properties") &&
                                      schema["properties"].contains(it.key());
                if (declared) continue;
                if (extra.is_boolean()) {
                    if (!extra.get<bool>())
                        return fail("unexpected key '" + it.key() + "'");
                } else if (!validate_node(it.value(), extra, path + "/" + it.key(), error)) {
                    return false;
                }
            }
        }
    }

    if (doc.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < doc.size(); ++i)
            if (!validate_node(doc[i], schema["items"], path + "[" + std::to_string(i) + "]",
                               error))
                return false;
    }

    return true;
}

}  // namespace

bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                     std::string* error) {
    return validate_node(doc, schema, "$", error);
}

}  // namespace specs
