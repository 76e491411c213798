#!/usr/bin/env python3
# Copyright 2026 The pipebench Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the synthetic fixture datasets in this directory.

Everything here is hand-written or derived from fixed arithmetic; no
randomness beyond a seeded generator, so reruns are byte-identical.
"""

import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent


def write_dataset(name, kind, records):
    path = HERE / f"{name}.jsonl"
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for r in records:
            line = dict(r)
            line["kind"] = kind
            line["schema"] = 1
            f.write(json.dumps(line, ensure_ascii=False, separators=(",", ":")) + "\n")
    manifest = {
        "name": name,
        "record_kind": kind,
        "count": len(records),
        "schema_version": 1,
        "created": {"gateway_profile": ""},
        "kind": "manifest",
        "schema": 1,
    }
    (HERE / f"{name}.manifest").write_text(json.dumps(manifest, separators=(",", ":")) + "\n", encoding="utf-8")


# --- questions ---------------------------------------------------------------

BASE_QUESTIONS = [
    ("expert", "Why does OLED efficiency roll off at high current density and which exciton quenching paths dominate?"),
    ("expert", "How does the choice of host material affect the lifetime of blue phosphorescent OLED emitters?"),
    ("doc-extracted", "What causes image retention in OLED panels and how can pixel compensation circuits mitigate it?"),
    ("paper-extracted", "How does thin film encapsulation protect flexible OLED stacks from moisture ingress?"),
    ("user-system", "Which factors limit the aperture ratio of high resolution LCD panels?"),
    ("expert", "How does the pretilt angle of liquid crystal molecules influence response time in VA mode LCD?"),
    ("doc-extracted", "Why do IPS mode LCD panels show wider viewing angles than TN mode panels?"),
    ("user-system", "What role does the polyimide alignment layer play in LCD cell assembly?"),
    ("expert", "How does oxygen vacancy density change the threshold voltage stability of IGZO TFT backplane devices?"),
    ("paper-extracted", "Why is excimer laser annealing used to crystallize LTPS for TFT backplane fabrication?"),
    ("doc-extracted", "How does gate insulator hydrogen content affect negative bias illumination stress in oxide TFT backplane devices?"),
    ("user-system", "What are the trade-offs between LTPO and LTPS TFT backplane designs for variable refresh rate phones?"),
    ("expert", "How does sidewall damage reduce the external quantum efficiency of small Micro-LED chips?"),
    ("paper-extracted", "Which mass transfer methods achieve the highest yield for Micro-LED display assembly?"),
    ("doc-extracted", "How can repair strategies compensate for dead pixels after Micro-LED mass transfer?"),
    ("user-system", "Why is wavelength uniformity across the wafer critical for Micro-LED displays?"),
    ("expert", "How does shell thickness affect the photoluminescence quantum yield of quantum dot color converters?"),
    ("paper-extracted", "Why are cadmium free indium phosphide quantum dot materials less efficient than cadmium selenide ones?"),
    ("doc-extracted", "How does blue light leakage through a quantum dot color conversion layer degrade color purity?"),
    ("user-system", "What encapsulation is needed to keep quantum dot films stable under high flux backlight operation?"),
    ("expert", "How does mura arise from photoresist thickness variation during color filter patterning?"),
    ("doc-extracted", "Which inspection methods detect line defects in array test before cell assembly?"),
    ("paper-extracted", "How does the fine metal mask tension affect pixel position accuracy during OLED evaporation?"),
    ("user-system", "Why do inkjet printed OLED layers show thickness nonuniformity near pixel bank edges?"),
    ("expert", "How do demura algorithms calibrate luminance nonuniformity on the production line?"),
    ("doc-extracted", "What process window controls critical dimension in source drain wet etching for TFT backplane arrays?"),
    ("paper-extracted", "How does polarizer removal in OLED panels with color filter on encapsulation improve outcoupling?"),
    ("user-system", "Which parameters control the cell gap uniformity of large LCD panels during one drop filling?"),
    ("expert", "How does hydrogen diffusion from silicon nitride passivation shift the characteristics of oxide TFT backplane devices?"),
    ("doc-extracted", "Why does the quantum dot on glass approach require a high temperature barrier film?"),
]

# Near variants of base questions: identical word multisets (reordered or
# re-cased) and one- or two-word edits.
VARIANTS = [
    (0, "why does OLED efficiency roll off at high current density, and which exciton quenching paths dominate"),
    (4, "Which factors limit the aperture ratio of high-resolution LCD panels?"),
    (9, "Why is excimer laser annealing used to crystallize LTPS for TFT backplane manufacturing?"),
    (13, "Which mass transfer methods achieve the best yield for Micro-LED display assembly?"),
    (17, "Why are cadmium free indium phosphide quantum dot materials much less efficient than cadmium selenide ones?"),
    (21, "Which inspection methods can detect line defects in array test before cell assembly?"),
]

SHORT = ["OLED burn-in causes?", "Explain LTPS.", "Micro-LED yield?"]


def questions():
    out = []
    for i, (src, text) in enumerate(BASE_QUESTIONS, start=1):
        out.append({"id": f"q{i:03d}", "text": text, "source": src})
    n = len(out)
    for j, (base, text) in enumerate(VARIANTS, start=1):
        out.append({"id": f"q{n + j:03d}", "text": text, "source": BASE_QUESTIONS[base][0]})
    n = len(out)
    for j, text in enumerate(SHORT, start=1):
        out.append({"id": f"q{n + j:03d}", "text": text, "source": "user-system"})
    return out


def signals(qs):
    out = []
    for i, q in enumerate(qs):
        ppl = 4.0 + (i * 37) % 23 + ((i * 13) % 10) / 10.0
        difficulty = 1 + (i * 7) % 5
        out.append({"id": q["id"], "ppl": ppl, "difficulty_score": float(difficulty)})
    return out


# --- chunks ------------------------------------------------------------------

ARTICLES = {
    "oled": [
        "Organic light emitting diodes emit light when injected electrons and holes recombine in an emissive layer. Phosphorescent emitters harvest both singlet and triplet excitons.",
        "Efficiency roll off appears at high current density because triplet triplet annihilation and triplet polaron quenching remove excitons before they emit.",
        "Blue emitters remain the lifetime bottleneck since high energy excitons break chemical bonds in the host and dopant molecules over time.",
        "Thin film encapsulation alternates inorganic barrier layers deposited by atomic layer deposition with planarizing organic layers to block moisture and oxygen.",
        "Fine metal masks define red green and blue subpixels during vacuum thermal evaporation, and mask tension sets the achievable pixel position accuracy.",
        "Pixel compensation circuits sense threshold voltage drift in the drive transistor and correct the data voltage so that luminance stays uniform as the panel ages.",
    ],
    "lcd": [
        "Liquid crystal displays modulate backlight with a layer of liquid crystal molecules placed between two polarizers and two glass substrates.",
        "The polyimide alignment layer is rubbed or photo aligned to set the pretilt angle that fixes the resting orientation of the molecules.",
        "Vertical alignment mode delivers high contrast, and a larger pretilt angle shortens the response time at the cost of some dark state leakage.",
        "In plane switching rotates molecules parallel to the substrate, which keeps the optical path similar across directions and widens the viewing angle.",
        "One drop filling dispenses a measured volume of liquid crystal before vacuum assembly, and photo spacers hold the cell gap uniform across large panels.",
        "Aperture ratio falls at high resolution because black matrix, storage capacitors and data lines occupy a larger share of each pixel area.",
    ],
    "tft": [
        "Thin film transistor backplanes switch and drive every pixel, and their mobility and stability set the limits of panel resolution and refresh rate.",
        "Indium gallium zinc oxide transistors offer low leakage current, yet oxygen vacancies act as donors and shift the threshold voltage under bias stress.",
        "Hydrogen released from silicon nitride passivation diffuses into the oxide channel and produces a negative threshold voltage shift.",
        "Excimer laser annealing melts amorphous silicon for a few nanoseconds so that it recrystallizes into low temperature polysilicon with high mobility.",
        "LTPO backplanes combine polysilicon switching transistors with oxide drive transistors so that refresh rate can drop to one hertz for static content.",
        "Wet etching of source and drain metal needs tight control of etchant concentration and time to hold critical dimension across the glass.",
    ],
    "microled": [
        "Micro light emitting diodes are inorganic emitters smaller than one hundred micrometers transferred onto a backplane to form self emissive pixels.",
        "Sidewall defects created by plasma etching add nonradiative recombination sites, so external quantum efficiency drops sharply as chip size shrinks.",
        "Mass transfer moves millions of chips per panel using elastomer stamps, laser lift off or fluidic self assembly, and each method trades throughput against yield.",
        "Dead pixels left after transfer are repaired with redundant subpixels or laser assisted replacement of individual chips.",
        "Wavelength nonuniformity across the epitaxial wafer leads to visible color shifts, so chips are binned or compensated after transfer.",
        # Lexically close to the first chunk, different technology.
        "Micro OLED microdisplays are organic emitters smaller than one hundred micrometers deposited onto a silicon backplane to form self emissive pixels.",
    ],
    "qd": [
        "Quantum dots are semiconductor nanocrystals whose emission wavelength depends on particle size through quantum confinement.",
        "A thicker inorganic shell suppresses surface traps and raises photoluminescence quantum yield, but it also increases particle size and lattice strain.",
        "Indium phosphide quantum dots avoid cadmium but suffer from broader emission and lower efficiency because of oxidation and lattice defects.",
        "Color conversion layers absorb blue light and re emit red and green, and residual blue leakage reduces color purity unless a blue cut filter is added.",
        "Barrier films with very low water vapor transmission rate keep quantum dot films stable under high flux backlight operation.",
        "Quantum dot on glass designs place the conversion film close to the LED and therefore need barrier layers that tolerate high temperature.",
    ],
}

MULTIHOP = [
    ("hop", 0, "The foldable panel line qualifies its encapsulation with the recipe named Aurora before final module assembly."),
    ("hop", 1, "Aurora specifies alternating alumina layers grown by plasma deposition at eighty degrees with cured acrylic interlayers."),
    ("hop", 2, "Vendors ship polarizer film rolls in climate controlled containers to avoid wrinkles."),
    ("hop", 3, "Touch sensor meshes use silver nanowire traces patterned by laser ablation."),
]


def chunks():
    out = []
    for doc, texts in ARTICLES.items():
        for i, text in enumerate(texts):
            out.append({"id": f"{doc}-{i + 1:02d}", "doc_id": doc, "position": i, "text": text,
                        "chunk_kind": "retrieved", "subdomain": doc})
    return out


def multihop_chunks():
    return [{"id": f"{doc}-{pos + 1:02d}", "doc_id": doc, "position": pos, "text": text, "chunk_kind": "retrieved"}
            for doc, pos, text in MULTIHOP]


def queries():
    return [
        {"id": "iq001", "text": "Which encapsulation process does the foldable panel line use?", "source": "user-system"},
        {"id": "iq002", "text": "Which touch sensor meshes use silver nanowire traces?", "source": "user-system"},
    ]


# --- evaluation --------------------------------------------------------------

FACTS = [
    ("What limits OLED efficiency at high brightness?",
     ["Efficiency roll off is driven by triplet triplet annihilation.", "Triplet polaron quenching also removes excitons.",
      "Both processes grow with current density.", "Emitters with short triplet lifetimes reduce roll off."]),
    ("Why do blue OLED emitters degrade fastest?",
     ["Blue excitons carry the highest energy.", "High energy excitons break bonds in host molecules.",
      "Degradation products act as quenchers.", "Hyperfluorescent designs shorten exciton lifetime."]),
    ("How does thin film encapsulation work?",
     ["Inorganic barrier layers block moisture.", "Organic layers planarize particles and defects.",
      "Layers alternate to lengthen permeation paths.", "Atomic layer deposition gives dense barriers."]),
    ("What sets the viewing angle of IPS panels?",
     ["Molecules rotate parallel to the substrate.", "The optical path changes little with direction.",
      "Contrast stays high at oblique angles.", "Fringe field designs raise transmittance."]),
    ("What does the LCD alignment layer do?",
     ["Polyimide sets the molecule orientation.", "Rubbing or photo alignment defines pretilt.",
      "Pretilt controls response and dark state.", "Contamination causes alignment mura."]),
    ("Why does VA mode give high contrast?",
     ["Molecules stand vertical in the dark state.", "Crossed polarizers then block almost all light.",
      "Multi domain structures widen viewing angle.", "Pretilt speeds up switching."]),
    ("What causes IGZO threshold voltage shift?",
     ["Oxygen vacancies act as donors.", "Bias stress traps charge at the interface.",
      "Illumination releases trapped electrons.", "Annealing in oxygen reduces vacancy density."]),
    ("Why use excimer laser annealing for LTPS?",
     ["The laser melts amorphous silicon briefly.", "The film recrystallizes into polysilicon.",
      "Polysilicon mobility exceeds amorphous silicon.", "The glass substrate stays cool."]),
    ("What is an LTPO backplane?",
     ["LTPO mixes polysilicon and oxide transistors.", "Oxide transistors hold charge with low leakage.",
      "Refresh rate can drop to one hertz.", "Power consumption falls for static images."]),
    ("Why does hydrogen matter in oxide TFTs?",
     ["Hydrogen from nitride films diffuses into the channel.", "Hydrogen acts as a shallow donor.",
      "The threshold voltage shifts negative.", "Oxide passivation limits hydrogen."]),
    ("Why does Micro-LED efficiency fall for small chips?",
     ["Etching damages the chip sidewalls.", "Sidewall defects cause nonradiative recombination.",
      "Small chips have a larger perimeter ratio.", "Sidewall passivation recovers efficiency."]),
    ("How is Micro-LED mass transfer done?",
     ["Elastomer stamps pick and place chips.", "Laser lift off releases chips from the wafer.",
      "Fluidic assembly uses shaped receptors.", "Each method trades throughput against yield."]),
    ("How are dead Micro-LED pixels repaired?",
     ["Redundant subpixels cover failed chips.", "Lasers remove faulty chips.",
      "Replacement chips are bonded individually.", "Inspection maps defects before repair."]),
    ("Why does Micro-LED wavelength uniformity matter?",
     ["Epitaxy varies across the wafer.", "Wavelength shifts appear as color errors.",
      "Chips are binned by wavelength.", "Compensation corrects residual shifts."]),
    ("What raises quantum dot quantum yield?",
     ["Shells passivate surface traps.", "Thicker shells raise quantum yield.",
      "Lattice mismatch adds strain.", "Gradient shells relieve strain."]),
    ("Why are InP quantum dots less efficient?",
     ["Indium phosphide oxidizes easily.", "Lattice defects broaden emission.",
      "Zinc selenide shells improve stability.", "Cadmium free rules drive adoption."]),
    ("How does quantum dot color conversion work?",
     ["Quantum dots absorb blue light.", "They emit red and green light.",
      "Blue leakage lowers color purity.", "Blue cut filters absorb leakage."]),
    ("How are quantum dot films protected?",
     ["Barrier films block water vapor.", "Oxygen quenches quantum dots.",
      "High flux speeds degradation.", "Encapsulation keeps films stable."]),
    ("What causes color filter mura?",
     ["Photoresist thickness varies across the glass.", "Thickness variation shifts color.",
      "Coating speed affects uniformity.", "Inspection finds mura before cell assembly."]),
    ("How does demura correct nonuniformity?",
     ["Cameras capture panel luminance.", "Algorithms compute per pixel corrections.",
      "Correction tables are stored in driver memory.", "Demura runs on the production line."]),
]

WRONG = [
    "Liquid crystals emit their own light.", "Quantum dots are made of organic polymers.",
    "Oxide transistors need excimer lasers.", "Micro-LED chips are larger than one millimeter.",
    "Encapsulation is only needed for LCD panels.", "Blue emitters last longest of all colors.",
]


def eval_cases():
    return [{"id": f"case{i + 1:02d}", "question": q, "ground_truth": " ".join(gt)} for i, (q, gt) in enumerate(FACTS)]


def model_outputs():
    out = []
    for i, (q, gt) in enumerate(FACTS):
        cid = f"case{i + 1:02d}"
        plans = {
            # all facts plus one error
            "model-alpha": gt + [WRONG[i % len(WRONG)]],
            # first two facts only
            "model-beta": gt[:2],
            # three facts, two errors on every other case
            "model-gamma": gt[:3] + ([WRONG[(i + 1) % len(WRONG)], WRONG[(i + 2) % len(WRONG)]] if i % 2 == 0 else []),
        }
        for model, sentences in plans.items():
            out.append({"id": f"{cid}/{model}", "question_id": cid, "model_id": model,
                        "answer_text": " ".join(sentences), "sampling_temperature": 0.0})
    return out


# --- training reports ------------------------------------------------------------

def dpo_items():
    rng = random.Random(7)
    out = []
    for i in range(16):
        base = rng.uniform(-80.0, -20.0)
        out.append({
            "id": f"pair{i + 1:02d}",
            "logp_policy_chosen": round(base + rng.uniform(-5, 5), 6),
            "logp_policy_rejected": round(base - 8 + rng.uniform(-5, 5), 6),
            "logp_ref_chosen": round(base + rng.uniform(-5, 5), 6),
            "logp_ref_rejected": round(base - 8 + rng.uniform(-5, 5), 6),
        })
    return out


def losses():
    rng = random.Random(11)
    return [{"id": f"neg{i + 1:03d}", "step": 1000, "loss": round(rng.uniform(0.05, 2.5), 6)} for i in range(50)]


def main():
    qs = questions()
    write_dataset("questions", "question", qs)
    write_dataset("signals", "signals", signals(qs))
    write_dataset("chunks", "chunk", chunks())
    write_dataset("multihop_chunks", "chunk", multihop_chunks())
    write_dataset("queries", "question", queries())
    write_dataset("eval_cases", "eval_case", eval_cases())
    write_dataset("model_outputs", "response", model_outputs())
    write_dataset("dpo_items", "dpo_item", dpo_items())
    write_dataset("losses", "loss_entry", losses())


if __name__ == "__main__":
    main()
