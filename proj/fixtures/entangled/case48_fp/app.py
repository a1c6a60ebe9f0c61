executor = make_executor(instructions="Summarize case 48 inputs.", retries=1)
