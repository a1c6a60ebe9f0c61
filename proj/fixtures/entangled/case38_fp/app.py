def build_llm(factory):
    return factory(model_name="gpt-4", temperature=0)
