#include "chrtc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "chrtc/canonical.hpp"
#include "chrtc/confluence.hpp"
#include "chrtc/desugar.hpp"
#include "chrtc/inference.hpp"
#include "chrtc/parser.hpp"
#include "chrtc/render.hpp"

namespace chrtc::cli {

namespace {

using Field = std::pair<std::string, std::string>;

// One key=value line; values that are not plain words are JSON-quoted.
std::string record(const std::vector<Field>& fields) {
  std::string line;
  for (const auto& [k, v] : fields) {
    const bool plain = !v.empty() && std::all_of(v.begin(), v.end(), [](unsigned char c) {
      return std::isalnum(c) || c == '-' || c == '_' || c == ':' || c == '.' || c == '\'';
    });
    if (!line.empty()) line += ' ';
    line += k + "=" + (plain ? v : nlohmann::json(v).dump());
  }
  return line + "\n";
}

class Output {
 public:
  explicit Output(Format f) : format_(f) {}

  void line(const std::string& text, const std::vector<Field>& fields) {
    out_ += format_ == Format::text ? text + "\n" : record(fields);
  }
  void warning(const std::string& text, const std::vector<Field>& fields) {
    if (format_ == Format::text) {
      err_ += "warning: " + text + "\n";
    } else {
      out_ += record(fields);
    }
  }
  void error(const std::string& text, std::vector<Field> fields) {
    err_ += "error: " + text + "\n";
    if (format_ == Format::records) out_ += record(fields);
  }
  void raw(const std::string& text) { out_ += text; }

  Result finish(int code) { return Result{code, std::move(out_), std::move(err_)}; }
  Format format() const { return format_; }

 private:
  Format format_;
  std::string out_;
  std::string err_;
};

BuildOptions build_options(const Options& o, bool check_confluence) {
  BuildOptions b;
  b.kind_constraints = o.kind_constraints;
  b.check_confluence = check_confluence;
  b.fuel = o.fuel;
  return b;
}

Result declaration_error(const LocatedError& e, Format format) {
  Output out(format);
  out.error(fmt::format("{}: {}", e.loc().str(), e.what()),
            {{"kind", "error"}, {"loc", e.loc().str()}, {"message", e.what()}});
  return out.finish(exit_code::declaration);
}

void report_warnings(const RuleSet& rules, Output& out) {
  for (const auto& w : rules.warnings) out.warning(w, {{"kind", "warning"}, {"message", w}});
}

std::string ambiguity_verdict(const AmbiguityResult& a) {
  if (a.inconclusive) return "inconclusive";
  return a.unambiguous() ? "unambiguous" : "possibly-ambiguous";
}

std::string signature_verdict(SignatureResult::Status s) {
  switch (s) {
    case SignatureResult::Status::ok: return "ok";
    case SignatureResult::Status::body_mismatch: return "body-mismatch";
    case SignatureResult::Status::unentailed: return "unentailed";
  }
  return "?";
}

}  // namespace

Result cmd_infer(const std::string& source, const Options& options) {
  Output out(options.format);
  SurfaceProgram program;
  RuleSet rules;
  std::vector<BindingReport> reports;
  InferOptions io;
  io.fuel = options.fuel;
  io.kind_constraints = options.kind_constraints;
  try {
    program = parse_program(source);
    rules = build_ruleset(program, build_options(options, true));
    reports = infer_program(program, rules, io);
  } catch (const LocatedError& e) {
    return declaration_error(e, options.format);
  }
  report_warnings(rules, out);

  bool type_error = false;
  bool inconclusive = false;
  bool ambiguous = false;
  auto note_ambiguity = [&](const std::string& what, const std::string& name, SourceLoc loc,
                            const TypeScheme& s, const AmbiguityResult& a) {
    if (a.inconclusive) {
      inconclusive = true;
      out.warning(fmt::format("{}: ambiguity check for {} '{}' ran out of fuel", loc.str(), what,
                              name),
                  {{"kind", "ambiguity"}, {"name", name}, {"verdict", "inconclusive"}});
    } else if (!a.unambiguous()) {
      ambiguous = true;
      out.warning(
          fmt::format("{}: {} '{}' has a possibly ambiguous type {}", loc.str(), what, name,
                      render(s)),
          {{"kind", "ambiguity"}, {"name", name}, {"verdict", "possibly-ambiguous"}});
    }
  };

  Inferencer inf(rules, io);
  for (const auto* cls : program.all<ClassDecl>()) {
    for (const auto& m : cls->methods) {
      const TypeScheme s = method_scheme(*cls, m);
      note_ambiguity("method", m.name, m.loc, s, inf.check_ambiguity(s));
    }
  }

  for (const auto& r : reports) {
    if (r.error) {
      if (r.fuel_exhausted) {
        inconclusive = true;
      } else {
        type_error = true;
      }
      out.error(*r.error, {{"kind", "error"}, {"name", r.name}, {"message", *r.error}});
      continue;
    }
    if (r.signature && !r.signature->ok()) {
      type_error = true;
      const auto msg = fmt::format("{}: signature for '{}' rejected: {}", r.loc.str(), r.name,
                                   r.signature->message);
      out.error(msg, {{"kind", "signature"},
                      {"name", r.name},
                      {"verdict", signature_verdict(r.signature->status)},
                      {"message", r.signature->message}});
      continue;
    }
    const TypeScheme& shown = r.declared ? *r.declared : *r.presented;
    std::vector<Field> fields{
        {"kind", "scheme"}, {"name", r.name}, {"loc", r.loc.str()}, {"type", render(shown)}};
    if (r.signature) fields.emplace_back("signature", "ok");
    fields.emplace_back("ambiguity", ambiguity_verdict(r.ambiguity));
    out.line(render_signature(r.name, shown), fields);
    note_ambiguity("binding", r.name, r.loc, *r.solved, r.ambiguity);
  }

  if (type_error) return out.finish(exit_code::type);
  if (inconclusive) return out.finish(exit_code::inconclusive);
  if (ambiguous && options.strict_ambiguity) return out.finish(exit_code::ambiguity);
  return out.finish(exit_code::ok);
}

Result cmd_rules(const std::string& source, const Options& options) {
  Output out(options.format);
  RuleSet rules;
  try {
    rules = build_ruleset(parse_program(source), build_options(options, false));
  } catch (const LocatedError& e) {
    return declaration_error(e, options.format);
  }
  auto dump = [&](const Program& p, const char* set) {
    for (const auto& r : p.rules()) {
      out.line(render(r), {{"kind", "rule"},
                           {"set", set},
                           {"name", r.name},
                           {"origin", rules.describe(r.name)},
                           {"rule", render(r)}});
    }
  };
  dump(rules.solving, "solving");
  dump(rules.presentation, "presentation");
  return out.finish(exit_code::ok);
}

namespace {

constexpr std::size_t kWitnessSteps = 40;

void render_verdict(const ConfluenceVerdict& v, const std::string& detail, Output& out) {
  out.line(fmt::format("verdict: {}", to_string(v.verdict)),
           {{"kind", "confluence"}, {"verdict", std::string(to_string(v.verdict))}});
  out.line(fmt::format("critical pairs checked: {}", v.pairs_checked),
           {{"kind", "pairs"}, {"checked", std::to_string(v.pairs_checked)}});
  if (!detail.empty()) out.line(detail, {{"kind", "reason"}, {"message", detail}});
  if (!v.witness || !v.witness_result) return;
  const auto& w = *v.witness;
  const auto& j = *v.witness_result;
  NameSupply names;
  out.line(fmt::format("overlap: {}", render_constraints(w.overlap, names)),
           {{"kind", "overlap"}, {"constraints", render_constraints(w.overlap, names)}});
  auto side = [&](const char* label, const std::string& rule, const Derivation& d) {
    std::string residue = "False";
    if (d.status == DeriveStatus::fuel_exceeded) residue = "(fuel exhausted)";
    if (d.status == DeriveStatus::final) residue = render_constraints(d.store(), names);
    if (out.format() == Format::text) {
      out.raw(fmt::format("{} ({} fired):\n", label, rule));
      // A fuel-exhausted side would print thousands of steps.
      std::istringstream trace(render_trace(d, names));
      std::size_t shown = 0;
      for (std::string step; std::getline(trace, step); ++shown) {
        if (shown < kWitnessSteps) out.raw(step + "\n");
      }
      if (shown > kWitnessSteps) out.raw(fmt::format("... {} more steps\n", shown - kWitnessSteps));
    }
    out.line(fmt::format("{} residue: {}", label, residue),
             {{"kind", "residue"}, {"side", label}, {"rule", rule}, {"store", residue}});
  };
  side("left", w.rule1, j.left);
  side("right", w.rule2, j.right);
}

}  // namespace

Result cmd_confluence(const std::string& source, const Options& options) {
  Output out(options.format);
  SurfaceProgram program;
  try {
    program = parse_program(source);
  } catch (const LocatedError& e) {
    return declaration_error(e, options.format);
  }
  try {
    // The precheck result is reported even when the verdict is an error.
    const TerminationCheck t = build_ruleset(program, build_options(options, false)).termination;
    out.line(t.passed ? "termination: passed" : "termination: failed (" + t.reason + ")",
             {{"kind", "termination"},
              {"verdict", t.passed ? "passed" : "failed"},
              {"reason", t.passed ? "-" : t.reason}});
    RuleSet rules = build_ruleset(program, build_options(options, true));
    render_verdict(rules.confluence, rules.confluence.reason, out);
    return out.finish(rules.confluence.verdict == Verdict::inconclusive ? exit_code::inconclusive
                                                                        : exit_code::ok);
  } catch (const DeclError& e) {
    if (!e.verdict()) return declaration_error(e, options.format);
    render_verdict(*e.verdict(), fmt::format("{}: {}", e.loc().str(), e.what()), out);
    return out.finish(exit_code::declaration);
  } catch (const LocatedError& e) {
    return declaration_error(e, options.format);
  }
}

Result cmd_derive(const std::string& source, const std::string& goal_text,
                  const Options& options) {
  Output out(options.format);
  RuleSet rules;
  std::vector<Item> goal;
  VarScope scope;
  try {
    rules = build_ruleset(parse_program(source), build_options(options, false));
    goal = parse_goal(goal_text, scope);
  } catch (const LocatedError& e) {
    return declaration_error(e, options.format);
  }
  VarSet v;
  for (const auto& [_, var] : scope) v.insert(var);
  DeriveOptions d;
  d.fuel = options.fuel;
  d.record_trace = options.trace;
  const Derivation result = derive(goal, rules.solving, v, d);

  NameSupply names;
  for (const auto& [_, var] : scope) names.name(var);
  if (options.trace && out.format() == Format::text) out.raw(render_trace(result, names));
  if (options.trace && out.format() == Format::records) {
    for (const auto& s : result.trace) {
      out.line({}, {{"kind", "step"},
                    {"index", std::to_string(s.index)},
                    {"transition", std::string(to_string(s.transition))},
                    {"rule", s.rule.empty() ? "-" : s.rule},
                    {"state", render_state(s.state, names)}});
    }
  }
  const std::string status(to_string(result.status));
  out.line("status: " + status, {{"kind", "status"}, {"status", status}});
  if (result.status == DeriveStatus::unsatisfiable) {
    std::string cause = result.failing_rule.empty() ? "" : rules.describe(result.failing_rule);
    if (cause.empty() && result.failed_equation) {
      cause = render(Item{*result.failed_equation}, names);
    }
    if (!cause.empty()) out.line("cause: " + cause, {{"kind", "cause"}, {"message", cause}});
  } else {
    const std::string store = render_constraints(result.store(), names);
    const Substitution residual = orient_protected(result.state.h, v).restricted(v);
    const std::string h = residual.bindings().empty() ? "True"
                                                      : render_substitution(residual, names);
    out.line("store: " + store, {{"kind", "store"}, {"constraints", store}});
    out.line("h: " + h, {{"kind", "h"}, {"bindings", h}});
  }
  out.line(fmt::format("steps: {}", result.steps),
           {{"kind", "steps"}, {"count", std::to_string(result.steps)}});
  return out.finish(result.status == DeriveStatus::fuel_exceeded ? exit_code::inconclusive
                                                                 : exit_code::ok);
}

int main(int argc, char** argv) {
  CLI::App app{"CHR-based type class checker"};
  app.require_subcommand(1);
  Options options;
  std::string format = "text";
  std::string file;
  std::string goal;

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", file, "Source file")->required()->check(CLI::ExistingFile);
    sub->add_option("--fuel", options.fuel, "Step budget per derivation")
        ->capture_default_str();
    sub->add_flag("--kind-constraints", options.kind_constraints,
                  "Replace type constructor applications by Kind1 constraints");
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "records"}))
        ->capture_default_str();
  };
  auto* infer = app.add_subcommand("infer", "Infer types of the top-level bindings");
  common(infer);
  infer->add_flag("--strict-ambiguity", options.strict_ambiguity,
                  "Exit with status 3 when a type is possibly ambiguous");
  auto* rules = app.add_subcommand("rules", "Print the CHR program of the declarations");
  common(rules);
  auto* confluence = app.add_subcommand("confluence", "Check the CHR program for confluence");
  common(confluence);
  auto* derive_cmd = app.add_subcommand("derive", "Run a goal against the CHR program");
  common(derive_cmd);
  derive_cmd->add_option("goal", goal, "Constraints, e.g. 'Ord [t1]'")->required();
  derive_cmd->add_flag("--trace", options.trace, "Print every transition");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  options.format = format == "records" ? Format::records : Format::text;

  std::ifstream in(file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string source = buffer.str();

  Result r;
  if (*infer) {
    r = cmd_infer(source, options);
  } else if (*rules) {
    r = cmd_rules(source, options);
  } else if (*confluence) {
    r = cmd_confluence(source, options);
  } else {
    r = cmd_derive(source, goal, options);
  }
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}

}  // namespace chrtc::cli
