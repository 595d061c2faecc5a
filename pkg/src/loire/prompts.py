"""Prompt text assets with ``str.format`` slots.

Bump PROMPTS_VERSION whenever any text below changes: replay fixtures are
keyed by request hash, so edits invalidate recorded responses.
"""

PROMPTS_VERSION = "1"

DOMAIN_PHRASES = {
    "affordance": "object affordance",
    "accessibility": "object accessibility",
    "interaction": "object interaction",
    "location": "object location",
    "need": "person's need",
}

# Domains whose conclusions are also emitted in negated form.
NEGATED_DOMAINS = ("affordance", "accessibility", "interaction")

# ---------------------------------------------------------------- Step 1

CONCLUSION_PREPARATION = (
    "According to commonsense knowledge in reality, please list 5 predicates between the "
    "given two objects to describe the {domain_phrase}.\n"
    "Examples:\n"
    "Object: Show, Artwork\n"
    "Predicate: CanBeAdaptedFrom(Show X, Artwork Y)\n"
    "\n"
    "Object: {object1}, {object2}\n"
    "Predicate:"
)

# ---------------------------------------------------------------- Step 2

PREMISE_INSTRUCTION = (
    "According to commonsense knowledge in realistic scenarios, please generate 2 logical rules "
    "in both Prolog and natural langauge to describe the premises of the given conclusion. "
    "The rules in Prolog should have the same meaning with the rules in natural language.\n"
    "{fact_count_line}\n"
    "{domain_description}\n"
    "The premises should not contain negative words such as 'not', 'no', 'never' and 'un-'\n"
    "\n"
    "{demonstrations}\n"
    "\n"
    "Conclusion: {conclusion}\n"
    "Rules:"
)

MULTI_FACT_LINE = (
    "Each rule should contain multiple premises and each premise should contain two variables "
    "in (X, Y, Z, Z1, Z2)."
)
SINGLE_FACT_LINE = (
    "Each rule should contain only one premise and the premise should contain the two "
    "variables X and Y."
)

DOMAIN_DESCRIPTIONS = {
    "affordance": (
        "The rules should describe object affordance based on its property (such as height, "
        "age, price) and requirement (such as required skill, source, tool)."
    ),
    "accessibility": (
        "The rules should describe object accessibility based on its physical condition, "
        "spatial and temporal restriction."
    ),
    "interaction": (
        "The rules should describe object interaction based on its physical, spatial or "
        "temporal properties (such as speed, hardness, density, height, time period)."
    ),
    "location": "The rules should describe the location information of an object.",
    "need": "The rules should describe person's need to take an action over the object.",
}

MULTI_FACT_DEMOS = {
    "affordance": (
        "Conclusion: CanCook(Person X, Food Y)\n"
        "Rules:\n"
        "1. CanCook(Person X, Food Y):- CanUse(Person X, Tool Z), UsedForCook(Tool Z, Food Y);\n"
        "If Person X can use Tool Z which is used for cooking Food Y, then Person X can cook Food Y.\n"
        "2. CanCook(Person X, Food Y):- Master(Person X, Skill Z), RequiredForCooking(Skill Z, Food Y);\n"
        "If Person X has mastered Skill Z which is required for cooking Food Y, then Person X can cook Food Y.\n"
        "\n"
        "Conclusion: CanDrive(Person X, Vehicle Y)\n"
        "Rules:\n"
        "1. CanDrive(Person X, Vehicle Y):- Have(Person X, Age Z1), RequireMinimumAge(Vehicle Y, Age Z2), "
        "BiggerThan(Age Z1, Age Z2);\n"
        "If Person X has Age Z1 and the minimum age requirement for driving Vehicle Y is Age Z2, "
        "Age Z1 is bigger than Age Z2, then Person X can drive Vehicle Y.\n"
        "2. CanDrive(Person X, Vehicle Y):- Obtain(Person X, Authorization Z), "
        "RequiredForDriving(Authorization Z, Vehicle Y);\n"
        "If Person X have obtained a specific Authorization Z and Authorization Z is required for "
        "driving Vehicle Y, then Person X can drive Vehicle Y."
    ),
    "accessibility": (
        "Conclusion: CanAccess(Person X, Show Y)\n"
        "Rules:\n"
        "1. CanAccess(Person X, Show Y):- LocatedIn(Person X, Region Z), BroadcastIn(Show Y, Region Z);\n"
        "If Person X is located in Region Z and Show Y is broadcast in Region Z, then Person X can "
        "access Show Y.\n"
        "\n"
        "Conclusion: CanNotAccess(Person X, Tool Y)\n"
        "Rules:\n"
        "1. CanNotAccess(Person X, Tool Y):- AllergicTo(Person X, Material Z), MadeOf(Tool Y, Material Z);\n"
        "If Person X is allergic to Material Z and Tool Y is made of Material Z, then Person X "
        "cannot access Tool Y."
    ),
    "interaction": (
        "Conclusion: CanSubmergeIn(Substance X, Substance Y)\n"
        "Rules:\n"
        "1. CanSubmergeIn(Substance X, Substance Y):- DensityOf(Substance X, Density Z1), "
        "DensityOf(Substance Y, Density Z2), BiggerThan(Density Z1, Density Z2);\n"
        "If Substance X has a Density Z1, the density of Substance Y is Density Z2, and Density Z1 "
        "is bigger than Density Z2, then Substance X can submerge in Substance Y."
    ),
    "location": (
        "Conclusion: OriginatedFrom(Food X, Region Y)\n"
        "Rules:\n"
        "1. OriginatedFrom(Food X, Region Y):- ProcessedIn(Food X, Facility Z), LocatedIn(Facility Z, Region Y);\n"
        "If Food X is processed in Facility Z and Facility Z is located in Region Y, then Food X "
        "originated from Region Y."
    ),
    "need": (
        "Conclusion: NeedToConsume(Person X, Drug Y)\n"
        "Rules:\n"
        "1. NeedToConsume(Person X, Drug Y):- Has(Person X, Disease Z), CanTreat(Drug Y, Disease Z);\n"
        "If Person X has Disease Z and Drug Y can treat Disease Z, then Person X needs to consume Drug Y."
    ),
}

SINGLE_FACT_DEMOS = (
    "Conclusion: Has(Person X, Skill Y)\n"
    "Rules:\n"
    "1. Has(Person X, Skill Y):- Learned(Person X, Skill Y);\n"
    "If Person X learned Skill Y, then Person X has Skill Y.\n"
    "2. Has(Person X, Skill Y):- Acquire(Person X, Skill Y);\n"
    "If Person X acquires Skill Y, then Person X has Skill Y."
)

# ---------------------------------------------------------------- Step 3

SELF_CRITIC = (
    "True or False? Please predict whether the input rule is accurate or not according to "
    "commonsense knowledge in realistic scenarios, and also explain why.\n"
    "Examples:\n"
    "Input: {true_input}\n"
    "Output: True. Because {true_explanation}\n"
    "Input: {false_input}\n"
    "Output: False. Because {false_explanation}\n"
    "\n"
    "Input: {candidate}\n"
    "Output:"
)

_BIRTH_SEASON = (
    "If Person X was born in Season Z and Plant Y blooms in the same Season Z, then Person X "
    "can access Plant Y.",
    "a person's birth season and a plant's blooming season has no logical connection.",
)

# (true input, true explanation, false input, false explanation)
CRITIC_DEMOS = {
    "affordance": (
        "If Person X has an Age Z1 and Vehicle Y requires an Age above Z2 for driving, with "
        "Age Z1 bigger than Age Z2, then Person X can drive Vehicle Y.",
        "Person X has achieved the minimum age required for driving Vehicle Y.",
        *_BIRTH_SEASON,
    ),
    "accessibility": (
        "If Person X is located in Region Z and Show Y is broadcast in Region Z, then Person X "
        "can access Show Y.",
        "a show broadcast in a region can be watched by people located in that region.",
        *_BIRTH_SEASON,
    ),
    "interaction": (
        "If Substance X has a Density Z1, the density of Substance Y is Density Z2, and Density "
        "Z1 is bigger than Density Z2, then Substance X can submerge in Substance Y.",
        "a denser substance sinks into a less dense one.",
        "If Tool X has a Weight Z1, Tool Y has a Weight Z2, and Weight Z1 is bigger than "
        "Weight Z2, then Tool X can fit in Tool Y.",
        "fitting inside another tool depends on size, not on weight.",
    ),
    "location": (
        "If Food X is processed in Facility Z and Facility Z is located in Region Y, then Food X "
        "originated from Region Y.",
        "a food processed in a facility comes from the region where the facility is located.",
        "If Person X likes Food Z and Food Z is popular in Region Y, then Person X was born in "
        "Region Y.",
        "liking a popular food of a region does not determine where a person was born.",
    ),
    "need": (
        "If Person X has Disease Z and Drug Y can treat Disease Z, then Person X needs to consume "
        "Drug Y.",
        "a person with a disease needs the drug that treats it.",
        "If Person X owns Vehicle Z and Vehicle Z is made of Material Y, then Person X needs to "
        "consume Material Y.",
        "owning a vehicle made of a material creates no need to consume that material.",
    ),
}

# ------------------------------------------------------ instruction tasks

CONCLUSION_GENERATION_INSTRUCTION = (
    "Given the premise, please generate its conclusion between X and Y in both Prolog and "
    "natural language.\n"
    "The conclusion in Prolog should have the same meaning with the conclusion in natural "
    "language.\n"
    "Each conclusion should contain only two variables X and Y without mentioning other "
    "variables, like A, B, C, Z."
)

CONCLUSION_GENERATION_DEMOS = (
    "### Examples:\n"
    "Premise: If Person X is allergic to Material Z and Furniture Y is made from Material Z.\n"
    "Conclusion:\n"
    "[Prolog]: CanNotHold(Person X, Furniture Y);\n"
    "[Natural Language]: Person X cannot hold Furniture Y.\n"
    "Premise: If Substance X has a Density Z1, the density of Substance Y is Density Z2, and "
    "Density Z1 is bigger than Density Z2.\n"
    "Conclusion:\n"
    "[Prolog]: CanSubmerge(Substance X, Substance Y);\n"
    "[Natural Language]: Substance X can submerge in Substance Y."
)

PREMISE_COMPLETION_INSTRUCTION = (
    "Given the conclusion and a part of its premise, please complete the remaining portion of "
    "the premise in both Prolog and natural language.\n"
    "The remaining premise in Prolog should have the same meaning with the remaining premise "
    "in natural language.\n"
    "Each fact in the remaining premise should contain two variables, like X, Y, Z, Z1, Z2, A, B."
)

PREMISE_COMPLETION_DEMOS = (
    "### Examples:\n"
    "Conclusion: Person X cannot use Furniture Y.\n"
    "Partial Premise: If Person X is allergic to Material Z,\n"
    "Remaining Premise:\n"
    "[Prolog]: MadeFrom(Furniture Y, Material Z);\n"
    "[Natural Language]: Furniture Y is made from Material Z.\n"
    "\n"
    "Conclusion: Substance X can submerge in Substance Y.\n"
    "Partial Premise: If Substance X has a Density Z1, the density of Substance Y is Density Z2,\n"
    "Remaining Premise:\n"
    "[Prolog]: BiggerThan(Density Z1, Density Z2);\n"
    "[Natural Language]: Density Z1 is bigger than Density Z2."
)

PREMISE_GENERATION_INSTRUCTION = (
    "Given the conclusion, please generate three different premises in both Prolog and natural "
    "language, ensuring that each Prolog premise conveys the same meaning as its natural "
    "language counterpart.\n"
    "Each premise should contain a specified number of facts, with each fact comprising only "
    "two variables, such as X, Y, Z, Z1, Z2, A, B."
)

PREMISE_GENERATION_DEMOS = (
    "### Examples:\n"
    "Fact number: 1 fact\n"
    "Conclusion: Person X has Skill Y.\n"
    "Three Premises:\n"
    "1. [Prolog] Learned(Person X, Skill Y); [Natural Language] If Person X learned Skill Y.\n"
    "2. [Prolog] Inherit(Person X, Skill Y); [Natural Language] If Person X inherits Skill Y.\n"
    "3. [Prolog] Acquire(Person X, Skill Y); [Natural Language] If Person X acquires Skill Y.\n"
    "\n"
    "Fact number: more than 2 facts\n"
    "Conclusion: Person X cannot attend Event Y.\n"
    "Three Premises:\n"
    "1. [Prolog] Have(Person X, Age Z1), RequireMinimumAge(Event Y, Age Z2), BiggerThan(Age Z2, "
    "Age Z1); [Natural Language] If Person X has Age Z1 and the minimum age requirement for "
    "attending Event Y is Age Z2, Age Z2 is bigger than Age Z1.\n"
    "2. [Prolog] Have(Person X, Height Z1), RequireAbove(Event Y, Height Z2), SmallerThan(Height "
    "Z1, Height Z2); [Natural Language] If Person X has a Height Z1, and Event Y requires a "
    "Height above Z2, and Height Z1 is smaller than Height Z2.\n"
    "3. [Prolog] HaveCriminalRecord(Person X, Event Z), ProhibitedBy(Event Z, Legislation A), "
    "EnforcedIn(Legislation A, Region B), HeldIn(Event Y, Region B); [Natural Language] If "
    "Person X has a criminal record for Event Z and Event Z is prohibited by Legislation A, "
    "which is enforced in Region B, and Event Y is held in Region B."
)

CONCLUSION_GENERATION_PROMPT = (
    CONCLUSION_GENERATION_INSTRUCTION + "\n\n" + CONCLUSION_GENERATION_DEMOS
    + "\n\n\nPremise: {premise}\nConclusion:"
)
PREMISE_COMPLETION_PROMPT = (
    PREMISE_COMPLETION_INSTRUCTION + "\n\n" + PREMISE_COMPLETION_DEMOS
    + "\n\n\nConclusion: {conclusion}\nPartial Premise: {partial_premise}\nRemaining Premise:"
)
PREMISE_GENERATION_PROMPT = (
    PREMISE_GENERATION_INSTRUCTION + "\n\n" + PREMISE_GENERATION_DEMOS
    + "\n\n\nFact number: {fact_num}\nConclusion: {conclusion}\nThree Premises:"
)

# ---------------------------------------------------------------- probing

PROBE_TEMPLATES = {
    1: "True or False? Please predict whether the input rule is very likely to be true.",
    2: "Right or Wrong? Please predict whether the input rule is valid and correct.",
    3: "Yes or No? Please predict whether the premise entails the conclusion.",
    4: "Premise: {premise}, Conclusion: {conclusion}. Does premise entail conclusion? "
       "Please answer Yes or No.",
    5: "Given the observations {premise}, can we draw the conclusion {conclusion}? "
       "Please answer Yes or No.",
}

PROBE_LABELS = {
    1: ("True", "False"),
    2: ("Right", "Wrong"),
    3: ("Yes", "No"),
    4: ("Yes", "No"),
    5: ("Yes", "No"),
}

COT_STRATEGIES = ("answer_explain", "think_answer", "self_consistency")

ANSWER_EXPLAIN_SUFFIX = ", and also explain why."
THINK_ANSWER_SUFFIX = (
    " Please first briefly explain your thought process in one sentence, and then give your answer."
)
SELF_CONSISTENCY_SUFFIX = (
    " Please first generate three different sentences to respectively explain your three "
    "thought processes briefly, and then based on the corresponding thought to give your answer. "
    "Finally, output the final answer according to majority voting."
)
