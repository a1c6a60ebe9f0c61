runner = spawn(llm="qwen3-max", max_tokens=512)
