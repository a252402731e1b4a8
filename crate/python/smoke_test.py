"""Smoke test for the jzs_bayes extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import json
import math

import jzs_bayes as jzs


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    t = jzs.t_from_p(0.012, 546)
    assert close(t, 2.5206, 1e-3), t

    s = jzs.TTestSummary.two_sample(t, 547, 547)
    bf10 = jzs.bf10(s)
    assert close(bf10, 1.544, 5e-3), bf10
    assert close(bf10 * jzs.bf01_g_form(s), 1.0, 1e-6)
    assert jzs.classify_evidence(bf10) == "anecdotal evidence for H1"
    assert jzs.posterior_prob(1.0) == 0.5

    r = jzs.analyze_study(547, p=0.012)
    assert close(r.bf10, bf10, 1e-12)
    assert math.floor(r.posterior_h1 * 100) == 60

    pair = [jzs.TTestSummary.two_sample(2.52, 547, 547), jzs.TTestSummary.two_sample(0.23, 555, 555)]
    m = jzs.meta_bf(pair)
    assert close(m.bf10, 0.30, 0.02), m.bf10

    report = json.loads(jzs.run_report())
    assert [k for k in report] == ["dataset", "config", "studies", "meta", "version"]
    assert len(report["studies"]) == 4 and len(report["meta"]) == 2
    assert "BF10 = 1.54" in jzs.run_report(text=True)

    bf_svg, post_svg = jzs.emit_charts()
    assert bf_svg.count('class="bar"') == 4 and 'class="bar meta"' in post_svg

    for bad in (lambda: jzs.classify_evidence(0.0), lambda: jzs.analyze_study(10, p=1.5)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("jzs_bayes", jzs.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
