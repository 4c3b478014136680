"""vizkb: a visualization knowledge-base engine and pair-augmentation toolkit.

Submodules
----------
spec        chart specification model and JSON format
hardrules   hard-constraint validation (H1-H7)
features    soft-constraint feature catalog and extraction
weights     integer weight tables and chart cost
primitives  identifier-free design-primitive tokens
enumerator  design-space completion within bounds
pairs       design pairs, differences, JSONL interchange
augment     primitive / feature / seed augmentation pipelines
labeling    classifier, active-learning, and label-store machinery
llm         LLM labeling over an HTTP chat endpoint
training    difference-vector training, splits, weight conversion
evaluate    compliance scoring and analysis reports
vegalite    render-grammar export with synthesized preview data
service     HTTP labeling service
cli         command-line entry points
"""

__version__ = "0.1.0"
