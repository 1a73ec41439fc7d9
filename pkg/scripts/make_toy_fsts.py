"""Regenerate the toy segmenter transducers shipped in src/subseglab/data/fst."""

from pathlib import Path

from subseglab.fst import build_segmenter_fst

OUT = Path(__file__).resolve().parents[1] / "src" / "subseglab" / "data" / "fst"

# English-like suffixing toy. Like the analyzer it imitates, it also returns
# the unsegmented input for covered words, so it is used with exclude_identity.
ENG = []
for stem in ("walk", "talk", "jump", "play", "kill", "call"):
    ENG += [stem, stem + "s", stem + "<B>s", stem + "<B>ed", stem + "<B>ing",
            stem + "<B>er", stem + "<B>er<B>s"]
ENG += ["the", "a", "he", "she", "with", "sword", "sword<B>s", "brother",
        "brother<B>s", "and", ".", ","]

# Turkish-like agglutinative toy covering the Acts 12:2 verse except the
# proper noun "Yuhannanın".
TUR = [
    "kardeş", "kardeş<B>i", "kardeş<B>ler", "kardeş<B>ler<B>i",
    "Yakub<B>u", "Yakub",
    "kılıç", "kılıç<B>la", "kı<B>lıç<B>la", "kılıç<B>lar", "kılıç<B>lar<B>la",
    "öl<B>dür<B>dü", "öl<B>dü", "öl<B>dür<B>ür",
    "ev", "ev<B>de", "ev<B>ler<B>de", "ev<B>i",
    ".", ",",
]


def main():
    for name, analyses in (("eng", ENG), ("tur", TUR)):
        d = OUT / name
        d.mkdir(parents=True, exist_ok=True)
        fst = build_segmenter_fst(analyses)
        fst.save(d / "arcs.att", d / "isyms.txt", d / "osyms.txt")
        print(f"wrote {name}: {len(fst.states)} states")


if __name__ == "__main__":
    main()
