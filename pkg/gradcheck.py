from gravrec.script import gradcheck

if __name__ == "__main__":
    gradcheck.main()
