#!/usr/bin/env python3
"""Regenerate the static corpora under tests/data and demo/.

The corpora are synthetic derivation trees over a small ERG-flavoured
label inventory.  Corpus "a" (human-like) spreads mass over stylistic
constructions; "b" and "c" (LLM-like) lean on head-complement chains and
number sequences, so the two cluster together in comparisons.  Files are
committed; rerun this only when the templates change, and re-review the
output.
"""

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

# (label, children...) for internal nodes; (label, "word") with a leading
# "~" marks a terminal surface
def T(label, *children):
    return (label, *children)


def W(label, word):
    return (label, "~" + word)


TEMPLATES = {
    "cats_sleep": T(
        "sb-hd_mc_c",
        T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("cat_n1", "cats")))),
        T("hd_optcmp_c", T("v_np_le", W("sleep_v1", "sleep"))),
    ),
    "the_dog_chased_cats": T(
        "sb-hd_mc_c",
        T("sp-hd_n_c", T("d_-_the_le", W("the_1", "the")),
          T("n_-_mc_le", W("dog_n1", "dog"))),
        T("hd-cmp_u_c",
          T("v_pst_olr", T("v_np_le", W("chase_v1", "chased"))),
          T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("cat_n1", "cats"))))),
    ),
    "big_old_cats": T(
        "sb-hd_mc_c",
        T("hdn_bnp_c",
          T("aj-hdn_adjn_c",
            T("aj_-_i_le", W("big_a1", "big")),
            T("aj-hdn_norm_c",
              T("aj_-_i_le", W("old_a1", "old")),
              T("n_pl_olr", T("n_-_mc_le", W("cat_n1", "cats")))))),
        T("hd_optcmp_c", T("v_np_le", W("sleep_v1", "sleep"))),
    ),
    "law_clause": T(
        "sb-hd_mc_c",
        T("sp-hd_n_c", T("d_-_the_le", W("the_1", "the")),
          T("n_vp_c_le", W("law_n2", "law"))),
        T("hd-cmp_u_c",
          T("v_np_le", W("see_v1", "sees")),
          T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("dog_n1", "dogs"))))),
    ),
    "conj_fragment": T(
        "cl_cnj-frg_c",
        T("mrk-nh_evnt_c",
          T("p_np_i_le", W("and_c1", "and")),
          T("hd_optcmp_c", T("v_np_le", W("sleep_v1", "sleep")))),
    ),
    "compound": T(
        "hdn_bnp_c",
        T("np-hdn_cpd_c",
          T("n_-_mc_le", W("dog_n1", "dog")),
          T("n_pl_olr", T("n_-_mc_le", W("cat_n1", "cats")))),
    ),
    "relative": T(
        "sb-hd_mc_c",
        T("hdn_bnp_c",
          T("hdn-aj_rc_c",
            T("n_pl_olr", T("n_-_mc_le", W("dog_n1", "dogs"))),
            T("hd-cmp_u_c",
              T("v_np_le", W("chase_v1", "chase")),
              T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("cat_n1", "cats"))))))),
        T("hd_optcmp_c", T("v_np_le", W("sleep_v1", "sleep"))),
    ),
    "topicalized": T(
        "flr-hd_nwh_c",
        T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("law_n1", "laws")))),
        T("sb-hd_mc_c",
          T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("dog_n1", "dogs")))),
          T("hd_optcmp_c", T("v_np_le", W("see_v1", "see")))),
    ),
    "number_sequence": T(
        "hdn_bnp_c",
        T("n-n_num-seq_c",
          T("n_-_c_le", W("num_ne", "12")),
          T("n_-_c_le", W("num_ne", "2024"))),
    ),
    "complement_chain": T(
        "sb-hd_mc_c",
        T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("dog_n1", "dogs")))),
        T("hd-cmp_u_c",
          T("v_vp_seq_le", W("want_v2", "want")),
          T("hd-cmp_u_c",
            T("v_np_le", W("see_v1", "see")),
            T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("cat_n1", "cats")))))),
    ),
    "punctuated": T(
        "hd-pct_c",
        T("hd_optcmp_c", T("v_np_le", W("sleep_v1", "sleep"))),
        W("pt_-_period_le", "."),
    ),
    "gerund": T(
        "hdn_bnp_c",
        T("v_nger-tr_dlr", T("v_np_le", W("chase_v1", "chasing"))),
    ),
    "oov": T(
        "sb-hd_mc_c",
        T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("cat_n1", "cats")))),
        T("hd_optcmp_c", W("zorpify", "zorp")),
    ),
    "quoted": T(
        "hdn_bnp_c",
        T("n_-_c_le", W("quote_n1", '"boo"')),
    ),
    "participle": T(
        "sb-hd_mc_c",
        T("hdn_bnp_c", T("n_pl_olr", T("n_-_mc_le", W("dog_n1", "dogs")))),
        T("hd-aj_int-unsl_c",
          T("hd_optcmp_c", T("v_psp_olr", T("v_np_le", W("sleep_v1", "slept")))),
          T("j_j-un_dlr", T("aj_-_i_le", W("old_a1", "unold")))),
    ),
}


def render(tree):
    """Assign pre-order ids and token spans, then print one line."""
    counter = [0]

    def build(node, start):
        counter[0] += 1
        node_id = counter[0]
        label = node[0]
        score = -((node_id * 3) % 7) / 4
        if isinstance(node[1], str) and node[1].startswith("~"):
            word = node[1][1:].replace("\\", "\\\\").replace('"', '\\"')
            return f'({node_id} {label} {score!r} {start} {start + 1} ("{word}"))', start + 1
        parts, cursor = [], start
        for child in node[1:]:
            text, cursor = build(child, cursor)
            parts.append(text)
        body = " ".join(parts)
        return f"({node_id} {label} {score!r} {start} {cursor} {body})", cursor

    text, _ = build(tree, 0)
    return text


CORPUS_A = (
    ["cats_sleep"] * 3 + ["the_dog_chased_cats"] * 3 + ["big_old_cats"] * 2
    + ["law_clause"] * 2 + ["conj_fragment"] + ["compound"] * 2 + ["relative"] * 2
    + ["topicalized"] + ["punctuated"] + ["quoted"] + ["participle"] * 2
)
CORPUS_B = (
    ["cats_sleep"] * 2 + ["the_dog_chased_cats"] * 2 + ["complement_chain"] * 4
    + ["number_sequence"] * 3 + ["punctuated"] * 2 + ["gerund"] + ["oov"]
)
CORPUS_C = (
    ["cats_sleep"] * 2 + ["the_dog_chased_cats"] + ["complement_chain"] * 5
    + ["number_sequence"] * 4 + ["punctuated"] + ["gerund"] + ["oov"]
)

AUTHORED = [
    ("A. Smith", "cats_sleep"), ("A. Smith", "the_dog_chased_cats"),
    ("A. Smith", "big_old_cats"), ("A. Smith", "law_clause"),
    ("A. Smith", "relative"), ("A. Smith", "topicalized"),
    ("A. Smith", "participle"),
    ("B. Jones", "cats_sleep"), ("B. Jones", "the_dog_chased_cats"),
    ("B. Jones", "big_old_cats"), ("B. Jones", "conj_fragment"),
    ("B. Jones", "compound"), ("B. Jones", "quoted"),
    ("C. Wu", "cats_sleep"), ("C. Wu", "the_dog_chased_cats"),
    (None, "punctuated"),
]

TYPES_TDL = """\
; mini grammar used by the fixture corpora
sign := *top*.
phrase := sign.
lex-rule := sign.
lexent := sign.
noun := lexent & [ LOCAL.HEAD noun ].
verb := lexent & [ LOCAL.HEAD verb ].
adj := lexent.
det := lexent.
punct := lexent.

sb-hd_mc_c := phrase.
hd-cmp_u_c := phrase.
hdn_bnp_c := phrase.
hd_optcmp_c := phrase.
sp-hd_n_c := phrase.
aj-hdn_norm_c := phrase.
aj-hdn_adjn_c := phrase.
hdn-aj_rc_c := phrase.
np-hdn_cpd_c := phrase.
mrk-nh_evnt_c := phrase.
hd-aj_int-unsl_c := phrase.
flr-hd_nwh_c := phrase.
cl_cnj-frg_c := phrase.
n-n_num-seq_c := phrase.
hd-pct_c := phrase.

n_pl_olr := lex-rule.
v_pst_olr := lex-rule.
v_psp_olr := lex-rule.
v_nger-tr_dlr := lex-rule.
j_j-un_dlr := lex-rule.

n_-_mc_le := noun & [ COMPS < > ].
n_-_c_le := noun.
n_pp_c-of_le := noun.
n_vp_c_le := noun & [ COMPS < vp > ].
v_np_le := verb.
v_vp_seq_le := verb.
aj_-_i_le := adj.
av_-_i-vp_le := adj.
p_np_i_le := lexent.
d_-_the_le := det.
pt_-_period_le := punct.
"""

LEXICON_TDL = """\
; mini lexicon used by the fixture corpora
the_1 := d_-_the_le & [ ORTH < "the" > ].
a_1 := d_-_the_le & [ ORTH < "a" > ].
cat_n1 := n_-_mc_le & [ ORTH < "cat" > ].
dog_n1 := n_-_mc_le & [ ORTH < "dog" > ].
law_n1 := n_-_mc_le & [ ORTH < "law" > ].
law_n2 := n_vp_c_le & [ ORTH < "law" > ].
fact_n2 := n_vp_c_le & [ ORTH < "fact" > ].
num_ne := n_-_c_le & [ ORTH < "12" > ].
quote_n1 := n_-_c_le & [ ORTH < "quote" > ].
sleep_v1 := v_np_le & [ ORTH < "sleep" > ].
chase_v1 := v_np_le & [ ORTH < "chase" > ].
see_v1 := v_np_le & [ ORTH < "see" > ].
want_v2 := v_vp_seq_le & [ ORTH < "want" > ].
big_a1 := aj_-_i_le & [ ORTH < "big" > ].
old_a1 := aj_-_i_le & [ ORTH < "old" > ].
quick_a1 := aj_-_i_le & [ ORTH < "quick" > ].
of_p1 := p_np_i_le & [ ORTH < "of" > ].
and_c1 := p_np_i_le & [ ORTH < "and" > ].
"""


def write_udf(path, names, header):
    lines = [f"# {header}"]
    for name in names:
        lines.append(render(TEMPLATES[name]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_jsonl(path, corpus, entries):
    lines = []
    for i, (author, name) in enumerate(entries, start=1):
        obj = {"corpus": corpus, "item": f"n{i}", "deriv": render(TEMPLATES[name])}
        if author:
            obj["author"] = author
        lines.append(json.dumps(obj, sort_keys=True))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main():
    data = ROOT / "tests" / "data"
    grammar = data / "grammar"
    grammar.mkdir(parents=True, exist_ok=True)
    (grammar / "types.tdl").write_text(TYPES_TDL, encoding="utf-8")
    (grammar / "lexicon.tdl").write_text(LEXICON_TDL, encoding="utf-8")
    write_udf(data / "fixture_a.udf", CORPUS_A, "fixture corpus a (human-like), 20 sentences")
    write_udf(data / "fixture_b.udf", CORPUS_B, "fixture corpus b (llm-like), 15 sentences")
    write_udf(data / "fixture_c.udf", CORPUS_C, "fixture corpus c (llm-like), 15 sentences")
    write_jsonl(data / "authors.jsonl", "nyt_mini", AUTHORED)

    demo = ROOT / "demo"
    demo_grammar = demo / "grammar"
    demo_grammar.mkdir(parents=True, exist_ok=True)
    (demo_grammar / "types.tdl").write_text(TYPES_TDL, encoding="utf-8")
    (demo_grammar / "lexicon.tdl").write_text(LEXICON_TDL, encoding="utf-8")
    authored = []
    for round_no in range(5):
        for author, name in AUTHORED:
            authored.append((author, name))
    write_jsonl(demo / "human_nyt.jsonl", "human_nyt", authored)
    write_udf(demo / "llm_alpha.udf", CORPUS_B * 4, "demo llm corpus alpha")
    write_udf(demo / "llm_beta.udf", CORPUS_C * 4, "demo llm corpus beta")
    config = {
        "out": "out",
        "seed": 20240501,
        "grammar": {"files": ["grammar/types.tdl", "grammar/lexicon.tdl"],
                    "lexicon": ["grammar/lexicon.tdl"]},
        "corpora": [
            {"id": "human_nyt", "path": "human_nyt.jsonl", "format": "jsonl", "role": "human"},
            {"id": "llm_alpha", "path": "llm_alpha.udf", "format": "udf-lines", "role": "llm"},
            {"id": "llm_beta", "path": "llm_beta.udf", "format": "udf-lines", "role": "llm"},
        ],
        "analysis": {
            "categories": ["construction", "lexical_rule", "lexical_type", "lexical_entry"],
            "sample_size": 40,
            "resamples": 2000,
            "alpha": 0.05,
            "min_sentences": 10,
            "top_k": 25,
        },
    }
    (demo / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    print("fixtures written under", data, "and", demo)


if __name__ == "__main__":
    main()
