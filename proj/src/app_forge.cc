// Copyright 2026 The bctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bctx/app_forge.h"

#include <cstdio>

#include <json.hpp>

#include "bctx/axml.h"
#include "bctx/error.h"
#include "bctx/rng.h"
#include "bctx/xml.h"

namespace bctx {
namespace {

constexpr char kAndroidNs[] = "http://schemas.android.com/apk/res/android";

using Json = nlohmann::json;

[[noreturn]] void Bad(const std::string& msg) { throw Error(ErrorCode::kBadConfig, "app spec: " + msg); }

std::string EscapeXml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string TagFor(ComponentKind k) { return std::string(ComponentKindName(k)); }

ComponentKind KindFromName(std::string_view s) {
  for (auto k : {ComponentKind::kActivity, ComponentKind::kService, ComponentKind::kReceiver, ComponentKind::kProvider}) {
    if (ComponentKindName(k) == s) return k;
  }
  Bad("unknown component kind '" + std::string(s) + "'");
}

dex::InvokeStyle StyleFromName(std::string_view s) {
  if (s == "virtual") return dex::InvokeStyle::kVirtual;
  if (s == "super") return dex::InvokeStyle::kSuper;
  if (s == "direct") return dex::InvokeStyle::kDirect;
  if (s == "static") return dex::InvokeStyle::kStatic;
  if (s == "interface") return dex::InvokeStyle::kInterface;
  Bad("unknown invoke style '" + std::string(s) + "'");
}

template <typename T>
T Get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const Json::exception&) {
    Bad(std::string("field '") + key + "' has the wrong type");
  }
}

dex::ForgeInsn ParseInsn(const Json& j) {
  const auto op = Get<std::string>(j, "op", "");
  if (op == "const-string") return dex::ForgeInsn::ConstString(Get<std::string>(j, "value", ""));
  if (op == "const-class") return dex::ForgeInsn::ConstClass(Get<std::string>(j, "type", ""));
  if (op == "return-void") return dex::ForgeInsn::ReturnVoid();
  if (op == "nop") return dex::ForgeInsn{};
  if (op == "opaque") return dex::ForgeInsn::Opaque(static_cast<std::uint8_t>(Get<int>(j, "opcode", 0)));
  if (op == "packed-switch-payload") return dex::ForgeInsn::PackedSwitch(Get<std::uint32_t>(j, "count", 0));
  if (op == "sparse-switch-payload") return dex::ForgeInsn::SparseSwitch(Get<std::uint32_t>(j, "count", 0));
  if (op == "fill-array-data-payload") {
    return dex::ForgeInsn::FillArrayData(static_cast<std::uint16_t>(Get<int>(j, "element_width", 1)),
                                         Get<std::uint32_t>(j, "count", 0));
  }
  if (op.starts_with("invoke-")) {
    return dex::ForgeInsn::Invoke(StyleFromName(op.substr(7)), ParseMethodSignature(Get<std::string>(j, "target", "")),
                                  Get<bool>(j, "range", false));
  }
  Bad("unknown instruction op '" + op + "'");
}

dex::DexSpec ParseDexSpec(const Json& j) {
  if (!j.is_object()) Bad("each dex entry must be an object");
  dex::DexSpec spec;
  spec.strings = Get<std::vector<std::string>>(j, "strings", {});
  if (!j.contains("classes")) return spec;
  for (const Json& c : j["classes"]) {
    dex::ForgeClass cls;
    cls.type = Get<std::string>(c, "type", "");
    if (c.contains("superclass") && c["superclass"].is_null()) {
      cls.superclass.reset();
    } else {
      cls.superclass = Get<std::string>(c, "superclass", "Ljava/lang/Object;");
    }
    cls.interfaces = Get<std::vector<std::string>>(c, "interfaces", {});
    cls.access_flags = Get<std::uint32_t>(c, "access_flags", dex::kAccPublic);
    if (c.contains("methods")) {
      for (const Json& m : c["methods"]) {
        dex::ForgeMethod fm;
        fm.name = Get<std::string>(m, "name", "");
        fm.descriptor = Get<std::string>(m, "descriptor", "()V");
        fm.access_flags = Get<std::uint32_t>(m, "access_flags", dex::kAccPublic);
        fm.has_code = Get<bool>(m, "has_code", true);
        if (m.contains("code")) {
          for (const Json& i : m["code"]) fm.code.push_back(ParseInsn(i));
        }
        cls.methods.push_back(std::move(fm));
      }
    }
    spec.classes.push_back(std::move(cls));
  }
  return spec;
}

// Demo corpus building blocks.
dex::MethodRef Ref(std::string type, std::string name, std::string desc = "()V") {
  return dex::MethodRef{std::move(type), std::move(name), std::move(desc)};
}

}  // namespace

std::string ManifestXml(const AppSpec& spec) {
  std::string x = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<manifest xmlns:android=\"";
  x += kAndroidNs;
  x += "\" package=\"" + EscapeXml(spec.package) + "\">\n";
  for (const auto& p : spec.permissions) x += "  <uses-permission android:name=\"" + EscapeXml(p) + "\"/>\n";
  x += "  <application>\n";
  for (const auto& c : spec.components) {
    const std::string tag = TagFor(c.kind);
    x += "    <" + tag + " android:name=\"" + EscapeXml(c.name) + "\"";
    if (c.actions.empty()) {
      x += "/>\n";
      continue;
    }
    x += ">\n      <intent-filter>\n";
    for (const auto& a : c.actions) x += "        <action android:name=\"" + EscapeXml(a) + "\"/>\n";
    x += "      </intent-filter>\n    </" + tag + ">\n";
  }
  x += "  </application>\n</manifest>\n";
  return x;
}

Bytes ForgeApk(const AppSpec& spec) {
  ZipWriter zip;
  const std::string xml = ManifestXml(spec);
  const Bytes manifest = spec.binary_manifest ? ForgeAxml(ParsePlainXml(xml)) : Bytes(xml.begin(), xml.end());
  zip.Add("AndroidManifest.xml", manifest, spec.method);
  for (std::size_t i = 0; i < spec.dexes.size(); ++i) {
    const std::string name = i == 0 ? "classes.dex" : "classes" + std::to_string(i + 1) + ".dex";
    zip.Add(name, dex::ForgeDex(spec.dexes[i]), spec.method);
  }
  for (const auto& [name, data] : spec.extra_entries) zip.Add(name, data, spec.method);
  return zip.Finish();
}

dex::MethodRef ParseMethodSignature(std::string_view text) {
  const auto arrow = text.find("->");
  const auto paren = text.find('(', arrow == std::string_view::npos ? 0 : arrow);
  if (arrow == std::string_view::npos || paren == std::string_view::npos) {
    Bad("method signature '" + std::string(text) + "' is not of the form Ltype;->name(args)ret");
  }
  dex::MethodRef ref{std::string(text.substr(0, arrow)), std::string(text.substr(arrow + 2, paren - arrow - 2)),
                     std::string(text.substr(paren))};
  if (!dex::IsValidTypeDescriptor(ref.defining_type, false) || ref.name.empty() ||
      !dex::ParseMethodDescriptor(ref.descriptor)) {
    Bad("malformed method signature '" + std::string(text) + "'");
  }
  return ref;
}

AppSpec ParseAppSpec(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    Bad(e.what());
  }
  if (!j.is_object()) Bad("top level must be an object");
  AppSpec spec;
  spec.package = Get<std::string>(j, "package", spec.package);
  spec.permissions = Get<std::vector<std::string>>(j, "permissions", {});
  for (const char* key : {"components", "dex"}) {
    if (j.contains(key) && !j[key].is_array()) Bad(std::string("'") + key + "' must be an array");
  }
  if (j.contains("resources") && !j["resources"].is_object()) Bad("'resources' must be an object");
  if (j.contains("components")) {
    for (const Json& c : j["components"]) {
      spec.components.push_back({KindFromName(Get<std::string>(c, "kind", "activity")), Get<std::string>(c, "name", ""),
                                 Get<std::vector<std::string>>(c, "actions", {})});
    }
  }
  if (j.contains("dex")) {
    for (const Json& d : j["dex"]) spec.dexes.push_back(ParseDexSpec(d));
  }
  if (j.contains("resources")) {
    for (const auto& [name, text] : j["resources"].items()) {
      if (!text.is_string()) Bad("resource '" + name + "' must be a string");
      const auto s = text.get<std::string>();
      spec.extra_entries.emplace_back(name, Bytes(s.begin(), s.end()));
    }
  }
  if (j.contains("arsc_strings")) {
    spec.extra_entries.emplace_back("resources.arsc", ForgeArsc(Get<std::vector<std::string>>(j, "arsc_strings", {})));
  }
  spec.binary_manifest = Get<bool>(j, "binary_manifest", true);
  const auto compression = Get<std::string>(j, "compression", "deflate");
  if (compression == "stored") {
    spec.method = ZipWriter::Method::kStored;
  } else if (compression != "deflate") {
    Bad("compression must be 'stored' or 'deflate'");
  }
  return spec;
}

std::filesystem::path ForgeDemoCorpus(const std::filesystem::path& dir, std::size_t per_class, std::uint64_t seed) {
  std::filesystem::create_directories(dir / "apks");
  Rng rng(seed);
  const std::vector<std::string> labels{"adware", "benign", "payfraud"};
  std::string manifest;
  char buf[128];
  for (const auto& label : labels) {
    for (std::size_t i = 0; i < per_class; ++i) {
      AppSpec app;
      std::snprintf(buf, sizeof buf, "com.demo.%s.app%03zu", label.c_str(), i);
      app.package = buf;
      std::string pkg_path = "L" + app.package + "/";
      for (char& c : pkg_path) c = c == '.' ? '/' : c;
      const std::string main = pkg_path + "MainActivity;";
      const std::string helper = pkg_path + "Helper;";

      dex::ForgeClass main_cls{main, "Landroid/app/Activity;", {}, dex::kAccPublic, {}};
      dex::ForgeClass helper_cls{helper, "Ljava/lang/Object;", {}, dex::kAccPublic, {}};
      dex::ForgeMethod on_create{"onCreate", "(Landroid/os/Bundle;)V", dex::kAccPublic, true, {}};
      const std::size_t helpers = 1 + rng.Below(4);
      for (std::size_t h = 0; h < helpers; ++h) {
        const std::string name = "work" + std::to_string(h);
        on_create.code.push_back(dex::ForgeInsn::Invoke(dex::InvokeStyle::kStatic, Ref(helper, name)));
        dex::ForgeMethod m{name, "()V", dex::kAccPublic | dex::kAccStatic, true, {}};
        const std::size_t filler = 20 + rng.Below(200);
        for (std::size_t f = 0; f < filler; ++f) m.code.push_back(dex::ForgeInsn::Opaque(static_cast<std::uint8_t>(0x01 + rng.Below(2))));
        if (label == "adware") {
          m.code.push_back(dex::ForgeInsn::Invoke(dex::InvokeStyle::kVirtual,
                                                  Ref("Lcom/google/android/gms/ads/AdView;", "loadAd",
                                                      "(Lcom/google/android/gms/ads/AdRequest;)V")));
          m.code.push_back(dex::ForgeInsn::ConstString("http://ads.tracker" + std::to_string(i % 3) + ".com/click"));
        } else if (label == "payfraud") {
          m.code.push_back(dex::ForgeInsn::Invoke(dex::InvokeStyle::kVirtual,
                                                  Ref("Lcom/alipay/sdk/app/PayTask;", "pay", "(Ljava/lang/String;)V")));
          m.code.push_back(dex::ForgeInsn::ConstString("10.0." + std::to_string(i % 4) + ".7"));
        } else {
          m.code.push_back(dex::ForgeInsn::Invoke(dex::InvokeStyle::kVirtual,
                                                  Ref("Lcom/google/firebase/analytics/FirebaseAnalytics;", "logEvent",
                                                      "(Ljava/lang/String;)V")));
          m.code.push_back(dex::ForgeInsn::ConstString("https://api.example.org/v" + std::to_string(1 + i % 2)));
        }
        m.code.push_back(dex::ForgeInsn::ReturnVoid());
        helper_cls.methods.push_back(std::move(m));
      }
      on_create.code.push_back(dex::ForgeInsn::ReturnVoid());
      main_cls.methods.push_back(std::move(on_create));
      app.dexes.push_back(dex::DexSpec{{}, {main_cls, helper_cls}});

      app.permissions.push_back("android.permission.INTERNET");
      app.components.push_back({ComponentKind::kActivity, ".MainActivity", {"android.intent.action.MAIN"}});
      if (label == "adware") {
        app.permissions.push_back("android.permission.SYSTEM_ALERT_WINDOW");
        app.components.push_back({ComponentKind::kReceiver, ".BootReceiver", {"android.intent.action.BOOT_COMPLETED"}});
      } else if (label == "payfraud") {
        app.permissions.push_back("android.permission.SEND_SMS");
        app.permissions.push_back("android.permission.READ_SMS");
      } else if (rng.Below(2) == 0) {
        app.permissions.push_back("android.permission.ACCESS_NETWORK_STATE");
      }

      std::snprintf(buf, sizeof buf, "%s-%03zu", label.c_str(), i);
      const std::string id = buf;
      const auto rel = std::filesystem::path("apks") / (id + ".apk");
      WriteFile(dir / rel, ForgeApk(app));
      Json line;
      line["id"] = id;
      line["path"] = rel.string();
      line["label"] = label;
      manifest += line.dump() + "\n";
    }
  }
  const auto path = dir / "corpus.jsonl";
  WriteFile(path, manifest);
  return path;
}

}  // namespace bctx
