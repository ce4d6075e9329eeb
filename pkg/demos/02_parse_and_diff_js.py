"""Parse JavaScript, read structural metrics, and diff two revisions.

Run with: python demos/02_parse_and_diff_js.py
"""

from semverml.jsparse import cyclomatic, file_metrics, parse_js
from semverml.treediff import diff_js_sources

BEFORE = """\
// collection helpers
const LIMIT = 32;

function pick(items, want) {
  const out = [];
  for (const item of items) {
    if (want(item) && out.length < LIMIT) {
      out.push(item);
    }
  }
  return out;
}

function total(xs) {
  let sum = 0;
  for (const x of xs) { sum += x; }
  return sum;
}
"""

# The same file one release later: `pick` gained a parameter and a guard,
# `total` was renamed, a helper was added, and the comment changed.
AFTER = """\
// collection helpers, v2
const LIMIT = 32;

function pick(items, want, cap) {
  const out = [];
  if (!items) { return out; }
  for (const item of items) {
    if (want(item) && out.length < LIMIT) {
      out.push(item);
    }
  }
  return out;
}

function sumAll(xs) {
  let sum = 0;
  for (const x of xs) { sum += x; }
  return sum;
}

function mean(xs) {
  return xs.length ? sumAll(xs) / xs.length : 0;
}
"""

ast = parse_js(BEFORE, "helpers.js")
metrics = file_metrics(ast)
print(f"before: loc={metrics.loc} functions={metrics.function_count} "
      f"cyclomatic_total={metrics.cyclomatic_total} "
      f"avg={metrics.cyclomatic_avg:.2f} globals={sorted(metrics.global_var_names)}")
for fn, value in cyclomatic(ast)["per_function"].items():
    print(f"  complexity {fn.name}: {value}")

# The differ matches the two trees (exact anchors, then dice-based
# containers, then leaf recovery) and classifies what changed.
counts = diff_js_sources(BEFORE, AFTER, "helpers.js")
print("\nchange-type counters (non-zero):")
for name, value in counts.as_dict().items():
    if value:
        print(f"  {name} = {value}")
