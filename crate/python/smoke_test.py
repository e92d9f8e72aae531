"""Smoke test for the cropforge Python bindings.

Build first, e.g. `maturin develop -m crates/python/Cargo.toml`, then run
`python python/smoke_test.py`.
"""
import json

import cropforge_py as cf


def main():
    layout = json.loads(cf.generate_field(3, category="c"))
    assert layout["category"] == "c"
    assert any(not p["present"] for p in layout["plants"])

    rgb, mask, w, h, meta = cf.render_pair(7, index=2, category="b")
    assert (w, h) == (512, 512)
    assert len(rgb) == w * h * 3 and len(mask) == w * h
    assert set(mask) <= {0, 255} and 255 in set(mask)
    assert json.loads(meta)["category"] == "b"
    again = cf.render_pair(7, index=2, category="b")
    assert again[0] == rgb and again[1] == mask

    counts = cf.confusion(mask, mask, w)
    assert counts["fp"] == 0 and counts["fn"] == 0
    assert cf.iou(mask, mask, w) == 1.0
    assert cf.iou(bytes(w * h), mask, w) == 0.0

    pred, lines = cf.detect_rows(rgb, w, h)
    assert len(pred) == w * h
    score = cf.iou(pred, mask, w)
    assert 0.0 <= score <= 1.0
    print(f"baseline: {len(json.loads(lines))} lines, IoU {score:.3f}")

    assert abs(cf.performance_score(0.2128) - 81.23) < 0.01
    assert abs(cf.performance_score(0.0693) + 139.54) < 0.01
    score, passed = cf.category_report({"a": 0.1588, "b": 0.1602, "c": 0.16})
    assert score == 2 and passed == {"a": False, "b": True, "c": True}
    assert cf.relative_percentage(1000, 500) == 50.0
    presets = {m: (s, r) for m, s, r in cf.mix_presets()}
    assert len(presets) == 13 and presets["B6"] == (1000, 500) and presets["R"] == (0, 750)
    try:
        cf.relative_percentage(0, 750)
    except ValueError:
        pass
    else:
        raise AssertionError("relative percentage without sim images must fail")
    print("smoke test ok")


if __name__ == "__main__":
    main()
